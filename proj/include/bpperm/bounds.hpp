#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bpperm/bethe.hpp"
#include "bpperm/matrix.hpp"
#include "bpperm/permanent.hpp"

namespace bpperm {

struct CapacityResult {
  double log_capacity = 0.0;
  std::vector<double> minimizer;  // x at the infimum, normalized to prod x = 1
  double gradient_norm = 0.0;     // infinity norm in y = log x
  std::size_t iterations = 0;
  bool converged = false;
};

// Mcap(p_A) = inf_{x > 0} prod_i (sum_j a_ij x_j) / prod_j x_j, found by
// minimizing the convex f(y) = sum_i log(sum_j a_ij e^{y_j}) - sum_j y_j.
// A zero row gives log_capacity = -inf without iterating.
CapacityResult capacity(const SquareMatrix& a, double tol = 1e-9, std::size_t max_iterations = 1000);

// The convex objective above, exposed for testing.
double capacity_objective(const SquareMatrix& a, const std::vector<double>& y);

// log(Mcap * n! / n^n) <= log perm(a).
double lower_bound_capacity(const SquareMatrix& a);

// log((n!/n^n) prod (1-b)^b) <= log perm(b .* (1-b)).
double lower_bound_beliefs(const BeliefMatrix& beliefs);

// log(2 prod_i b_i^pi(i) (1 - b_i^pi(i))) <= log perm(b .* (1-b)). Without an
// explicit matching the best one (max weight on log(b(1-b))) is used.
double lower_bound_matching(const BeliefMatrix& beliefs, const std::optional<Matching>& pi = std::nullopt);

// sum_j log(1 - sum_i b_ij^2) >= log perm(b .* (1-b)); a saturated column
// contributes -inf.
double upper_bound_hadamard(const BeliefMatrix& beliefs);

// |log Mcap(p_w) - log Z_BP - log Mcap(p_{b(1-b)}) + sum log(1-b)|.
double capacity_invariance_check(const WeightMatrix& w, const BPSolution& solution);

// Bounds on z_LS = perm(b .* (1-b)) / prod(1-b), all natural logs.
struct BoundsReport {
  std::optional<double> log_z_ls_exact;
  double log_lb_capacity = 0.0;
  double log_lb_beliefs = 0.0;
  double log_lb_matching = 0.0;
  double log_ub_hadamard = 0.0;
  bool sandwich_ok = true;
  // Non-interior beliefs: BP is exact there, every field is log 1 = 0.
  bool degenerate = false;
};

inline constexpr double kSandwichSlack = 1e-9;

BoundsReport bounds_report(const BeliefMatrix& beliefs, std::size_t cap = kDefaultExactCap);

}  // namespace bpperm
