#pragma once

#include <json.hpp>

#include "bpperm/bethe.hpp"
#include "bpperm/bounds.hpp"
#include "bpperm/critical.hpp"
#include "bpperm/estimators.hpp"
#include "bpperm/matrix.hpp"

namespace bpperm {

// Non-finite doubles serialize as null.
nlohmann::json to_json(const EstimatorResult& r);
nlohmann::json to_json(const BoundsReport& r);
nlohmann::json to_json(const Matching& m);
nlohmann::json to_json(const CriticalReport& r);

// Reads tolerance, max_iterations, damping, seed and saturation_threshold
// from `config` or from its "solver" member; absent keys keep their value.
void apply_solver_config(const nlohmann::json& config, SolverOptions& opts);

}  // namespace bpperm
