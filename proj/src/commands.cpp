#include "bpperm/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bpperm/bounds.hpp"
#include "bpperm/critical.hpp"
#include "bpperm/homogeneous.hpp"
#include "bpperm/loop_series.hpp"
#include "bpperm/parallel.hpp"
#include "bpperm/random.hpp"
#include "bpperm/serialize.hpp"

namespace bpperm {

namespace {

bool is_input_error(const Error& e) {
  return dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ShapeError*>(&e) ||
         dynamic_cast<const DomainError*>(&e) || dynamic_cast<const CapacityError*>(&e);
}

nlohmann::json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  (void)ec;
  return {buf, ptr};
}

std::string format_optional(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x)) return {};
  return format_double(*x);
}

}  // namespace

// ---- estimate ----

nlohmann::json estimate_report(const WeightMatrix& w, const RunOptions& opts, int& exit_code) {
  exit_code = kExitOk;
  const std::size_t n = w.n();
  const BPSolution sol = bp_solve(w, opts.solver);

  nlohmann::json report;
  report["n"] = n;
  report["temperature"] = w.infinite_temperature() ? nlohmann::json("inf") : nlohmann::json(w.temperature());
  report["converged"] = sol.converged;
  report["interior"] = sol.interior;
  report["saturated"] = sol.saturated;
  report["log_z_bp"] = number_or_null(sol.log_z_bp);
  report["bethe_entropy"] = bethe_entropy(sol.beliefs);
  report["mean_field_entropy"] = mean_field_entropy(sol.beliefs);
  report["log_z_ls"] = nullptr;
  report["log_perm_bp"] = nullptr;

  if (sol.saturated) {
    report["note"] = "saturated: no interior BP solution at this temperature; beliefs snapped to a matching";
    report["bounds"] = to_json(bounds_report(sol.beliefs, opts.exact_cap));
  } else if (sol.converged && sol.interior) {
    const BoundsReport bounds = bounds_report(sol.beliefs, opts.exact_cap);
    report["bounds"] = to_json(bounds);
    if (bounds.log_z_ls_exact) {
      report["log_z_ls"] = *bounds.log_z_ls_exact;
      report["log_perm_bp"] = sol.log_z_bp + *bounds.log_z_ls_exact;
    }
  } else {
    report["note"] = "BP did not converge within max_iterations; values are from the best iterate";
    exit_code = kExitNotConverged;
  }

  if (n <= opts.exact_cap) report["log_perm_exact"] = number_or_null(permanent_exact(w, opts.exact_cap).log_magnitude);
  try {
    report["ml_matching"] = to_json(ml_matching(w));
  } catch (const InfeasibleError&) {
    report["ml_matching"] = nullptr;
  }
  if (opts.with_tc) {
    try {
      report["t_critical"] = critical_temperature(w).t_critical;
    } catch (const Error& e) {
      report["t_critical"] = nullptr;
      report["t_critical_error"] = e.what();
    }
  }
  report["residuals"] = {{"fixed_point", number_or_null(sol.residual_fixed_point)},
                         {"stochastic", number_or_null(sol.residual_stochastic)}};
  report["iterations"] = sol.iterations;
  return report;
}

int cmd_estimate(const EstimateRequest& req, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    WeightMatrix w = load_matrix(req.matrix, req.format.value_or(guess_matrix_format(req.matrix)));
    if (req.temperature) w = w.with_temperature(*req.temperature);
    int code = kExitOk;
    const auto report = estimate_report(w, opts, code);
    out << report.dump(2) << '\n';
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e) ? kExitInputError : kExitVerifyFailed;
  }
}

// ---- sweep ----

std::vector<double> sweep_temperatures(double t_min, double t_max, std::size_t steps) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || steps < 2) {
    throw DomainError("sweep requires 0 < t_min <= t_max and steps >= 2");
  }
  std::vector<double> ts(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    ts[k] = k + 1 == steps ? t_max : t_min + (t_max - t_min) * static_cast<double>(k) / static_cast<double>(steps - 1);
  }
  return ts;
}

std::vector<SweepRow> sweep_rows(const SweepRequest& req, const std::vector<double>& temperatures,
                                 const RunOptions& opts) {
  const bool homogeneous = req.family == "homogeneous";
  if (!homogeneous && req.family != "file") throw ParseError("unknown sweep family '" + req.family + "'");
  const WeightMatrix base = homogeneous ? homogeneous_instance(req.n, req.big_w)
                                        : load_matrix(req.matrix, guess_matrix_format(req.matrix));

  std::vector<SweepRow> rows(temperatures.size());
  parallel_for(temperatures.size(), opts.workers, [&](std::uint64_t k) {
    const double t = temperatures[k];
    const WeightMatrix w = base.with_temperature(t);
    const BPSolution sol = bp_solve(w, opts.solver);
    SweepRow& row = rows[k];
    row.temperature = t;
    row.t_ln_z_bp = t * sol.log_z_bp;
    std::optional<double> log_z;
    if (homogeneous) {
      log_z = homogeneous_log_z(req.n, req.big_w, t);
    } else if (w.n() <= opts.exact_cap) {
      log_z = permanent_exact(w, opts.exact_cap).log_magnitude;
    }
    if (log_z) {
      row.t_ln_z_exact = t * *log_z;
      row.log_ratio_exact = *log_z - sol.log_z_bp;
    }
    row.interior = sol.converged && sol.interior;
    if (row.interior) {
      const BoundsReport b = bounds_report(sol.beliefs, opts.exact_cap);
      row.log_lb_capacity = b.log_lb_capacity;
      row.log_lb_beliefs = b.log_lb_beliefs;
      row.log_lb_matching = b.log_lb_matching;
      row.log_ub_hadamard = b.log_ub_hadamard;
    }
  });
  return rows;
}

std::string format_sweep_row(const SweepRow& row) {
  std::string line = format_double(row.temperature);
  line += "," + format_optional(row.t_ln_z_exact);
  line += "," + format_double(row.t_ln_z_bp);
  line += "," + format_optional(row.log_ratio_exact);
  line += "," + format_optional(row.log_lb_capacity);
  line += "," + format_optional(row.log_lb_matching);
  line += "," + format_optional(row.log_ub_hadamard);
  line += row.interior ? ",true" : ",false";
  return line;
}

int cmd_sweep(const SweepRequest& req, const RunOptions& opts, std::ostream& err) {
  try {
    const auto temperatures = sweep_temperatures(req.t_min, req.t_max, req.steps);

    // Resume: keep the longest prefix of existing rows whose temperatures
    // match the requested grid.
    std::vector<std::string> kept;
    if (req.resume && std::filesystem::exists(req.out)) {
      std::ifstream in(req.out);
      std::string line;
      if (std::getline(in, line) && line == kSweepHeader) {
        while (kept.size() < temperatures.size() && std::getline(in, line)) {
          const auto comma = line.find(',');
          if (comma == std::string::npos || line.substr(0, comma) != format_double(temperatures[kept.size()])) {
            break;
          }
          kept.push_back(line);
        }
      }
    }

    const std::vector<double> remaining(temperatures.begin() + static_cast<std::ptrdiff_t>(kept.size()),
                                        temperatures.end());
    const auto rows = sweep_rows(req, remaining, opts);

    std::ofstream out(req.out, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write " + req.out.string());
    out << kSweepHeader << '\n';
    for (const auto& line : kept) out << line << '\n';
    for (const auto& row : rows) out << format_sweep_row(row) << '\n';
    if (!out) throw ParseError("failed writing " + req.out.string());
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e) ? kExitInputError : kExitVerifyFailed;
  }
}

// ---- verify ----

WeightMatrix verify_instance(std::uint64_t seed, std::uint64_t trial, std::size_t n_max) {
  const CounterRng rng(seed, 0x7e51);
  // Orders 3..n_max: a generic positive 2x2 matrix has no interior fixed
  // point, since the gauge condition forces w11 w22 = w12 w21.
  const std::size_t span = n_max - 2;
  const std::size_t n = 3 + std::min(span - 1, static_cast<std::size_t>(rng.uniform(trial, 0) * static_cast<double>(span)));
  SquareMatrix p(n);
  for (std::size_t k = 0; k < n * n; ++k) p.values()[k] = rng.uniform(trial, static_cast<std::uint32_t>(k + 1), 0.1, 1.0);
  return WeightMatrix(std::move(p), 1.0);
}

namespace {

inline constexpr const char* kChecks[] = {"bp_fixed_point", "master_identity", "loop_series", "bounds_sandwich",
                                          "capacity_invariance"};
inline constexpr std::size_t kCheckCount = std::size(kChecks);

struct TrialOutcome {
  std::size_t n = 0;
  bool saturated = false;  // no interior solution at T = 1; checks do not apply
  std::array<int, kCheckCount> status{};  // 1 pass, -1 fail, 0 not applicable
  std::vector<std::string> failures;
};

TrialOutcome run_trial(const WeightMatrix& w, const RunOptions& opts) {
  TrialOutcome t;
  t.n = w.n();
  auto record = [&](std::size_t check, bool ok, const std::string& detail) {
    t.status[check] = ok ? 1 : -1;
    if (!ok) t.failures.push_back(std::string(kChecks[check]) + ": " + detail);
  };
  try {
    const BPSolution sol = bp_solve(w, opts.solver);
    if (sol.saturated) {
      t.saturated = true;
      return t;
    }
    const bool usable = sol.converged && sol.interior;
    record(0, usable,
           "converged=" + std::to_string(sol.converged) + " interior=" + std::to_string(sol.interior) +
               " residual=" + format_double(std::max(sol.residual_fixed_point, sol.residual_stochastic)));
    if (!usable) {
      for (std::size_t c = 1; c < kCheckCount; ++c) record(c, false, "no converged interior solution");
      return t;
    }
    const double via_bp = permanent_via_bp(w, sol, opts.exact_cap).log_magnitude;
    const double exact = permanent_exact(w, opts.exact_cap).log_magnitude;
    record(1, std::abs(via_bp - exact) <= 1e-6, "log perm via BP " + format_double(via_bp) + " vs exact " + format_double(exact));

    if (w.n() <= kMaxLoopEnumeration) {
      const double series = z_ls_brute_series(sol.beliefs);
      const double direct = std::exp(z_ls_exact(sol.beliefs, opts.exact_cap).log_magnitude);
      record(2, std::abs(series - direct) <= 1e-8 * std::abs(direct),
             "series " + format_double(series) + " vs permanent form " + format_double(direct));
    }

    const BoundsReport b = bounds_report(sol.beliefs, opts.exact_cap);
    record(3, b.sandwich_ok, "bounds do not bracket log z_LS");

    const double gap = capacity_invariance_check(w, sol);
    record(4, gap <= 1e-6, "capacity invariance gap " + format_double(gap));
  } catch (const Error& e) {
    t.failures.push_back(std::string("exception: ") + e.what());
    for (auto& s : t.status)
      if (s == 0) s = -1;
  }
  return t;
}

}  // namespace

int cmd_verify(const VerifyRequest& req, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  if (req.n_max < 3 || req.n_max > 7) {
    err << "error: verify requires 3 <= n_max <= 7\n";
    return kExitInputError;
  }
  const std::uint64_t seed = opts.solver.seed;
  std::vector<TrialOutcome> outcomes(req.trials);
  parallel_for(req.trials, opts.workers,
               [&](std::uint64_t k) { outcomes[k] = run_trial(verify_instance(seed, k, req.n_max), opts); });

  std::array<std::uint64_t, kCheckCount> passed{}, ran{};
  std::uint64_t saturated = 0;
  nlohmann::json repro = nlohmann::json::array();
  for (std::uint64_t k = 0; k < req.trials; ++k) {
    const auto& t = outcomes[k];
    saturated += t.saturated;
    for (std::size_t c = 0; c < kCheckCount; ++c) {
      if (t.status[c] != 0) ++ran[c];
      if (t.status[c] == 1) ++passed[c];
    }
    if (!t.failures.empty()) {
      const WeightMatrix w = verify_instance(seed, k, req.n_max);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < w.n(); ++i) rows.emplace_back(w.raw().row(i).begin(), w.raw().row(i).end());
      repro.push_back({{"seed", seed}, {"trial", k}, {"n", w.n()}, {"failures", t.failures}, {"p", rows},
                       {"temperature", 1.0}});
    }
  }

  out << "verify seed=" << seed << " trials=" << req.trials << " n_max=" << req.n_max << '\n';
  for (std::size_t c = 0; c < kCheckCount; ++c) {
    out << "  " << kChecks[c] << ": " << passed[c] << "/" << ran[c] << " passed\n";
  }
  out << "  saturated (no interior solution, skipped): " << saturated << '\n';
  if (repro.empty()) {
    out << "result: PASS\n";
    return kExitOk;
  }
  std::ofstream dump(req.repro, std::ios::binary | std::ios::trunc);
  dump << repro.dump(2) << '\n';
  out << "result: FAIL (" << repro.size() << " failing trials, reproduction written to " << req.repro.string()
      << ")\n";
  return kExitVerifyFailed;
}

// ---- entry point ----

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Permanents of non-negative matrices via belief propagation and loop calculus", "bpperm"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions opts;
  std::optional<double> tolerance, damping, saturation;
  std::optional<std::size_t> max_iter;
  std::optional<std::uint64_t> seed;
  std::string config_path;
  app.add_option("--tolerance", tolerance, "BP residual tolerance (default 1e-10)");
  app.add_option("--max-iter", max_iter, "BP iteration limit (default 50000)");
  app.add_option("--damping", damping, "BP damping in [0, 1) (default 0.5)");
  app.add_option("--saturation-threshold", saturation, "saturation threshold (default 1e-12)");
  app.add_option("--seed", seed, "random seed (default 0)");
  app.add_option("--exact-cap", opts.exact_cap, "largest n for exact permanents")->capture_default_str();
  app.add_flag("--with-tc", opts.with_tc, "also compute the critical temperature");
  app.add_option("--workers", opts.workers, "worker threads")->capture_default_str();
  app.add_option("--config", config_path, "JSON file with a solver options block");

  EstimateRequest est;
  std::string est_format;
  auto* estimate = app.add_subcommand("estimate", "single-instance JSON report");
  estimate->add_option("matrix", est.matrix, "matrix file (CSV or JSON)")->required();
  estimate->add_option("--format", est_format, "csv or json (default: from extension)");
  estimate->add_option("--temperature,-T", est.temperature, "temperature (overrides the file)");

  SweepRequest sw;
  auto* sweep = app.add_subcommand("sweep", "temperature sweep written as CSV");
  sweep->add_option("--family", sw.family, "homogeneous or file")->capture_default_str();
  sweep->add_option("--n", sw.n, "order of the homogeneous instance")->capture_default_str();
  sweep->add_option("--w", sw.big_w, "diagonal weight W of the homogeneous instance")->capture_default_str();
  sweep->add_option("--matrix", sw.matrix, "matrix file for --family file");
  sweep->add_option("--t-min", sw.t_min)->capture_default_str();
  sweep->add_option("--t-max", sw.t_max)->capture_default_str();
  sweep->add_option("--steps", sw.steps)->capture_default_str();
  sweep->add_option("--out", sw.out, "output CSV path")->capture_default_str();
  sweep->add_flag("--resume", sw.resume, "keep rows already present in the output");

  VerifyRequest ver;
  auto* verify = app.add_subcommand("verify", "randomized oracle checks");
  verify->add_option("--n-max", ver.n_max)->capture_default_str();
  verify->add_option("--trials", ver.trials)->capture_default_str();
  verify->add_option("--repro", ver.repro, "where to dump failing instances")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ParseError("cannot open config " + config_path);
      nlohmann::json config;
      try {
        config = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid config JSON: ") + e.what());
      }
      apply_solver_config(config, opts.solver);
    }
    if (tolerance) opts.solver.tolerance = *tolerance;
    if (max_iter) opts.solver.max_iterations = *max_iter;
    if (damping) opts.solver.damping = *damping;
    if (saturation) opts.solver.saturation_threshold = *saturation;
    if (seed) opts.solver.seed = *seed;
    if (!est_format.empty()) est.format = parse_matrix_format(est_format);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  if (estimate->parsed()) return cmd_estimate(est, opts, out, err);
  if (sweep->parsed()) return cmd_sweep(sw, opts, err);
  return cmd_verify(ver, opts, out, err);
}

}  // namespace bpperm
