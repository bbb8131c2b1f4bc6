#include "bpperm/serialize.hpp"

#include <cmath>

namespace bpperm {

namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

nlohmann::json to_json(const EstimatorResult& r) {
  return {{"mean", number(r.mean)}, {"std_error", number(r.std_error)}, {"samples", r.samples}, {"seed", r.seed}};
}

nlohmann::json to_json(const BoundsReport& r) {
  return {{"log_z_ls_exact", r.log_z_ls_exact ? number(*r.log_z_ls_exact) : nlohmann::json(nullptr)},
          {"log_lb_capacity", number(r.log_lb_capacity)},
          {"log_lb_beliefs", number(r.log_lb_beliefs)},
          {"log_lb_matching", number(r.log_lb_matching)},
          {"log_ub_hadamard", number(r.log_ub_hadamard)},
          {"sandwich_ok", r.sandwich_ok},
          {"degenerate", r.degenerate}};
}

nlohmann::json to_json(const Matching& m) {
  return {{"perm", m.perm}, {"log_weight", number(m.log_weight)}, {"unique", m.unique}};
}

nlohmann::json to_json(const CriticalReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.det_values) samples.push_back({s.temperature, s.sign, number(s.log_abs)});
  return {{"t_critical", r.t_critical}, {"roots", r.roots}, {"ml_matching", to_json(r.ml)},
          {"det_values", samples}};
}

void apply_solver_config(const nlohmann::json& config, SolverOptions& opts) {
  const nlohmann::json& block = config.contains("solver") ? config.at("solver") : config;
  if (!block.is_object()) throw ParseError("solver configuration must be a JSON object");
  try {
    if (block.contains("tolerance")) opts.tolerance = block.at("tolerance").get<double>();
    if (block.contains("max_iterations")) opts.max_iterations = block.at("max_iterations").get<std::size_t>();
    if (block.contains("damping")) opts.damping = block.at("damping").get<double>();
    if (block.contains("seed")) opts.seed = block.at("seed").get<std::uint64_t>();
    if (block.contains("saturation_threshold")) {
      opts.saturation_threshold = block.at("saturation_threshold").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad solver configuration: ") + e.what());
  }
}

}  // namespace bpperm
