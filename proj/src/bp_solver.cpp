#include <algorithm>
#include <cmath>
#include <limits>

#include "bpperm/bethe.hpp"
#include "bpperm/random.hpp"

namespace bpperm {

namespace {

// Sinkhorn sweeps with warm-started scalings; leaves columns exact and
// returns the largest row-sum deviation.
double scale_in_place(const SquareMatrix& k, std::vector<double>& u, std::vector<double>& v, double tol,
                      std::size_t max_sweeps) {
  const std::size_t n = k.n();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < max_sweeps && worst > tol; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += k(i, j) * v[j];
      u[i] = 1.0 / s;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += u[i] * k(i, j);
      v[j] = 1.0 / s;
    }
    worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += k(i, j) * v[j];
      worst = std::max(worst, std::abs(u[i] * s - 1.0));
    }
  }
  return worst;
}

SquareMatrix random_start(std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed, 0x5eed);
  SquareMatrix k(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = rng.uniform(i, static_cast<std::uint32_t>(j), 0.5, 1.5);
  return sinkhorn(k);
}

// Row argmax, if it is a permutation.
std::vector<std::size_t> nearest_permutation(const SquareMatrix& beta) {
  const std::size_t n = beta.n();
  std::vector<std::size_t> perm(n);
  std::vector<bool> taken(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = beta.row(i);
    perm[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    if (taken[perm[i]]) return {};
    taken[perm[i]] = true;
  }
  return perm;
}

}  // namespace

BPSolution bp_solve(const WeightMatrix& w, const SolverOptions& opts) {
  if (!w.strictly_positive()) throw DomainError("BP requires strictly positive weights");
  if (!(opts.damping >= 0.0 && opts.damping < 1.0)) throw DomainError("damping must lie in [0, 1)");
  const std::size_t n = w.n();
  const SquareMatrix log_w = w.log_scaled();

  // Row-normalized weights; the row scale is absorbed by the Sinkhorn factors.
  SquareMatrix base(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = log_w.row(i);
    const double top = *std::max_element(r.begin(), r.end());
    for (std::size_t j = 0; j < n; ++j) base(i, j) = std::exp(log_w(i, j) - top);
  }

  SquareMatrix beta = opts.random_start ? random_start(n, opts.seed) : BeliefMatrix::uniform(n).matrix();
  BPSolution sol;
  sol.beliefs = BeliefMatrix(beta);
  sol.residual_fixed_point = std::numeric_limits<double>::infinity();
  sol.residual_stochastic = std::numeric_limits<double>::infinity();

  if (n == 1) {
    sol.beliefs = BeliefMatrix::permutation({0});
    sol.saturated = true;
    sol.residual_fixed_point = sol.residual_stochastic = 0.0;
    sol.log_z_bp = log_w(0, 0);
    return sol;
  }

  const double inner_tol = std::max(0.1 * opts.tolerance, 1e-15);
  const double lo = opts.saturation_threshold;
  const double hi = 1.0 - opts.saturation_threshold;
  std::vector<double> u(n, 1.0), v(n, 1.0);
  SquareMatrix k(n);
  double best_score = std::numeric_limits<double>::infinity();

  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    // Minimize the convex part of the free energy with the concave part
    // -(1-b)ln(1-b) linearized at the current iterate: the minimizer over
    // the polytope is the Sinkhorn scaling of w / (1 - beta).
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) k(i, j) = base(i, j) / (1.0 - beta(i, j));
    scale_in_place(k, u, v, inner_tol, 10000);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double next = u[i] * k(i, j) * v[j];
        beta(i, j) = (1.0 - opts.damping) * next + opts.damping * beta(i, j);
      }
    }

    const auto [mn, mx] = std::minmax_element(beta.values().begin(), beta.values().end());
    if (*mn < lo || *mx > hi) {
      sol.iterations = it;
      sol.saturated = true;
      sol.interior = false;
      sol.converged = false;
      const auto perm = nearest_permutation(beta);
      if (perm.empty()) {
        sol.beliefs = BeliefMatrix(beta);
        sol.log_z_bp = bethe_log_z(sol.beliefs, w);
        sol.residual_stochastic = sol.beliefs.stochastic_residual();
        return sol;
      }
      sol.beliefs = BeliefMatrix::permutation(perm);
      sol.log_z_bp = bethe_log_z(sol.beliefs, w);
      sol.residual_fixed_point = 0.0;
      sol.residual_stochastic = 0.0;
      return sol;
    }

    const BeliefMatrix current(beta);
    const double res_st = current.stochastic_residual();
    const double res_fp = gauge_residual(current, log_w);
    const double score = std::max(res_st, res_fp);
    if (score < best_score) {
      best_score = score;
      sol.beliefs = current;
      sol.residual_stochastic = res_st;
      sol.residual_fixed_point = res_fp;
    }
    sol.iterations = it;
    if (res_st <= opts.tolerance && res_fp <= opts.tolerance) {
      sol.converged = true;
      break;
    }
  }

  sol.interior = sol.beliefs.interior();
  if (sol.interior) {
    // Tolerance only matters for the converged case; a best iterate still
    // gets its least-squares multipliers.
    const auto m = recover_multipliers(sol.beliefs, w, std::numeric_limits<double>::infinity());
    sol.mu_rows = m.rows;
    sol.mu_cols = m.cols;
    sol.log_z_bp = sol.converged ? log_z_bp(sol, w) : bethe_log_z(sol.beliefs, w);
  } else {
    sol.log_z_bp = bethe_log_z(sol.beliefs, w);
  }
  return sol;
}

}  // namespace bpperm
