#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bpperm/matrix.hpp"

namespace bpperm {

// Edge marginals beta_i^j of the perfect-matching model. Entries lie in
// [0, 1]; row and column sums are 1 for every belief matrix produced by the
// solver.
class BeliefMatrix {
 public:
  BeliefMatrix() = default;
  // Throws DomainError if an entry falls outside [0, 1].
  explicit BeliefMatrix(SquareMatrix beta);

  // Additionally requires every row and column sum within tol of 1.
  static BeliefMatrix checked(SquareMatrix beta, double tol = 1e-9);
  static BeliefMatrix uniform(std::size_t n);
  static BeliefMatrix permutation(const std::vector<std::size_t>& perm);

  std::size_t n() const { return beta_.n(); }
  double operator()(std::size_t i, std::size_t j) const { return beta_(i, j); }
  const SquareMatrix& matrix() const { return beta_; }

  // Every entry strictly inside (0, 1).
  bool interior() const;
  // max |row sum - 1| and |column sum - 1|.
  double stochastic_residual() const;

 private:
  SquareMatrix beta_;
};

// sum over edges of (1-b) ln(1-b) - b ln b, with 0 ln 0 = 0.
double bethe_entropy(const BeliefMatrix& beliefs);

// sum over edges of -b ln b - (1-b) ln(1-b).
double mean_field_entropy(const BeliefMatrix& beliefs);

// F = T sum [b ln(b / w) - (1-b) ln(1-b)], w = p^(1/T). Throws
// DivergenceError when b > 0 on a zero weight and DomainError at infinite
// temperature, where F itself is unbounded; use bethe_log_z there.
double bethe_free_energy(const BeliefMatrix& beliefs, const WeightMatrix& w);

// -F/T, finite at every temperature including T = infinity.
double bethe_log_z(const BeliefMatrix& beliefs, const WeightMatrix& w);

// Largest violation of the rank-one condition on m = b(1-b)/w:
// max over i,j,k,l of |log m_ij + log m_kl - log m_il - log m_kj|.
// Requires interior beliefs and positive weights.
double gauge_residual(const BeliefMatrix& beliefs, const SquareMatrix& log_w);

// Diagonal scaling D1 k D2 of a positive matrix to doubly stochastic form.
// Stops when every row and column sum is within tol of 1.
SquareMatrix sinkhorn(const SquareMatrix& k, double tol = 1e-14, std::size_t max_sweeps = 100000);

struct Multipliers {
  std::vector<double> rows;  // mu_i
  std::vector<double> cols;  // mu^j, gauge mu^1 = 0
};

// Least-squares fit of mu_i + mu^j = log(b(1-b)/w) over all n^2 edges.
// Throws NotFixedPointError when the gauge residual exceeds tol and
// DomainError for non-interior beliefs.
Multipliers recover_multipliers(const BeliefMatrix& beliefs, const WeightMatrix& w, double tol = 1e-8);

struct SolverOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 50000;
  double damping = 0.5;
  std::uint64_t seed = 0;
  double saturation_threshold = 1e-12;
  // Start from a seeded random doubly stochastic matrix instead of 1/n.
  bool random_start = false;
};

struct BPSolution {
  BeliefMatrix beliefs;
  std::vector<double> mu_rows;
  std::vector<double> mu_cols;
  double log_z_bp = 0.0;
  std::size_t iterations = 0;
  double residual_fixed_point = 0.0;
  double residual_stochastic = 0.0;
  bool converged = false;
  bool interior = false;
  // Iterates reached the saturation threshold; beliefs were snapped to the
  // permutation they approached and log_z_bp is that matching's log weight.
  bool saturated = false;
};

// Interior fixed point of the Bethe free energy over doubly stochastic
// matrices. Requires strictly positive weights (DomainError otherwise).
BPSolution bp_solve(const WeightMatrix& w, const SolverOptions& opts = {});

// log Z_BP as -F/T and as sum log(1-b) - sum mu_i - sum mu^j; throws
// InconsistencyError if they differ by more than tol * max(1, |log Z_BP|).
// For saturated beliefs only the first route is defined and is returned.
double log_z_bp(const BPSolution& solution, const WeightMatrix& w, double tol = 1e-8);

// Closed-form interior fixed point of the homogeneous model: off-diagonal
// eps = (n-1-W^(1/T)) / ((n-1)^2 - W^(1/T)), diagonal 1 - (n-1) eps.
// Requires n >= 3, W > 1 and T >= ln W / ln(n-1) (DomainError otherwise);
// exactly at that temperature eps = 0 and the result is the identity.
BeliefMatrix homogeneous_bp_ansatz(std::size_t n, double big_w, double temperature);

}  // namespace bpperm
