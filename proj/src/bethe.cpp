#include "bpperm/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bpperm {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

BeliefMatrix::BeliefMatrix(SquareMatrix beta) : beta_(std::move(beta)) {
  for (double b : beta_.values()) {
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("belief entries must lie in [0, 1]");
  }
}

BeliefMatrix BeliefMatrix::checked(SquareMatrix beta, double tol) {
  BeliefMatrix out(std::move(beta));
  if (out.stochastic_residual() > tol) throw DomainError("beliefs are not doubly stochastic");
  return out;
}

BeliefMatrix BeliefMatrix::uniform(std::size_t n) {
  return BeliefMatrix(SquareMatrix(n, 1.0 / static_cast<double>(n)));
}

BeliefMatrix BeliefMatrix::permutation(const std::vector<std::size_t>& perm) {
  SquareMatrix b(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) b(i, perm.at(i)) = 1.0;
  return BeliefMatrix(std::move(b));
}

bool BeliefMatrix::interior() const {
  return std::all_of(beta_.values().begin(), beta_.values().end(),
                     [](double b) { return b > 0.0 && b < 1.0; });
}

double BeliefMatrix::stochastic_residual() const {
  const std::size_t n = beta_.n();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0, c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      r += beta_(i, j);
      c += beta_(j, i);
    }
    worst = std::max({worst, std::abs(r - 1.0), std::abs(c - 1.0)});
  }
  return worst;
}

double bethe_entropy(const BeliefMatrix& beliefs) {
  double s = 0.0;
  for (double b : beliefs.matrix().values()) s += xlogx(1.0 - b) - xlogx(b);
  return s;
}

double mean_field_entropy(const BeliefMatrix& beliefs) {
  double s = 0.0;
  for (double b : beliefs.matrix().values()) s -= xlogx(b) + xlogx(1.0 - b);
  return s;
}

double bethe_log_z(const BeliefMatrix& beliefs, const WeightMatrix& w) {
  if (beliefs.n() != w.n()) throw ShapeError("beliefs and weights differ in order");
  double energy = 0.0;  // sum b log w
  for (std::size_t i = 0; i < w.n(); ++i) {
    for (std::size_t j = 0; j < w.n(); ++j) {
      const double b = beliefs(i, j);
      if (b == 0.0) continue;
      const double lw = w.log_scaled(i, j);
      if (std::isinf(lw)) throw DivergenceError("positive belief on a zero weight");
      energy += b * lw;
    }
  }
  return energy + bethe_entropy(beliefs);
}

double bethe_free_energy(const BeliefMatrix& beliefs, const WeightMatrix& w) {
  if (w.infinite_temperature()) {
    throw DomainError("Bethe free energy is unbounded at infinite temperature");
  }
  return -w.temperature() * bethe_log_z(beliefs, w);
}

double gauge_residual(const BeliefMatrix& beliefs, const SquareMatrix& log_w) {
  const std::size_t n = beliefs.n();
  SquareMatrix l(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = beliefs(i, j);
      l(i, j) = std::log(b) + std::log1p(-b) - log_w(i, j);
    }
  }
  // For a row pair (i, k) the worst quadrilateral is max_j d_j - min_j d_j
  // with d_j = l_ij - l_kj.
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = l(i, j) - l(k, j);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      worst = std::max(worst, hi - lo);
    }
  }
  if (std::isnan(worst)) return std::numeric_limits<double>::infinity();
  return worst;
}

SquareMatrix sinkhorn(const SquareMatrix& k, double tol, std::size_t max_sweeps) {
  const std::size_t n = k.n();
  std::vector<double> u(n, 1.0), v(n, 1.0);
  SquareMatrix out(n);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
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
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += u[i] * k(i, j) * v[j];
      worst = std::max(worst, std::abs(s - 1.0));
    }
    if (worst <= tol) break;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = u[i] * k(i, j) * v[j];
  return out;
}

Multipliers recover_multipliers(const BeliefMatrix& beliefs, const WeightMatrix& w, double tol) {
  if (!beliefs.interior()) throw DomainError("multipliers require interior beliefs");
  if (!w.strictly_positive()) throw DomainError("multipliers require positive weights");
  const std::size_t n = beliefs.n();
  const SquareMatrix log_w = w.log_scaled();
  const double residual = gauge_residual(beliefs, log_w);
  if (!(residual <= tol)) {
    throw NotFixedPointError("beliefs violate the fixed-point gauge condition (residual " +
                             std::to_string(residual) + ")");
  }

  // Two-way additive fit: mu_i = row mean, mu^j = column mean - grand mean,
  // then shift so that mu^1 = 0.
  std::vector<double> row_mean(n, 0.0), col_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = beliefs(i, j);
      const double l = std::log(b) + std::log1p(-b) - log_w(i, j);
      row_mean[i] += l;
      col_mean[j] += l;
      grand += l;
    }
  }
  const double dn = static_cast<double>(n);
  for (auto& r : row_mean) r /= dn;
  for (auto& c : col_mean) c /= dn;
  grand /= dn * dn;

  Multipliers m{std::vector<double>(n), std::vector<double>(n)};
  const double shift = col_mean[0] - grand;
  for (std::size_t i = 0; i < n; ++i) m.rows[i] = row_mean[i] + shift;
  for (std::size_t j = 0; j < n; ++j) m.cols[j] = col_mean[j] - grand - shift;
  m.cols[0] = 0.0;
  return m;
}

double log_z_bp(const BPSolution& solution, const WeightMatrix& w, double tol) {
  const BeliefMatrix& beliefs = solution.beliefs;
  const double route_energy = bethe_log_z(beliefs, w);
  if (!beliefs.interior()) return route_energy;

  Multipliers m{solution.mu_rows, solution.mu_cols};
  if (m.rows.size() != w.n() || m.cols.size() != w.n()) m = recover_multipliers(beliefs, w, tol);

  double route_multipliers = 0.0;
  for (double b : beliefs.matrix().values()) route_multipliers += std::log1p(-b);
  for (double mu : m.rows) route_multipliers -= mu;
  for (double mu : m.cols) route_multipliers -= mu;

  if (!(std::abs(route_energy - route_multipliers) <= tol * std::max(1.0, std::abs(route_energy)))) {
    throw InconsistencyError("log Z_BP routes disagree: " + std::to_string(route_energy) + " vs " +
                             std::to_string(route_multipliers));
  }
  return route_energy;
}

BeliefMatrix homogeneous_bp_ansatz(std::size_t n, double big_w, double temperature) {
  if (n < 3) throw DomainError("homogeneous ansatz requires n >= 3");
  if (!(big_w > 1.0)) throw DomainError("homogeneous ansatz requires W > 1");
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  const double scaled_w = std::isinf(temperature) ? 1.0 : std::pow(big_w, 1.0 / temperature);
  const double m = static_cast<double>(n - 1);
  // Below the critical temperature W^(1/T) exceeds n-1 and eps turns negative.
  if (scaled_w > m * (1.0 + 1e-12)) {
    throw DomainError("no interior homogeneous solution below T_c = ln W / ln(n-1)");
  }
  const double eps = std::max(0.0, (m - scaled_w) / (m * m - scaled_w));
  SquareMatrix b(n, eps);
  for (std::size_t i = 0; i < n; ++i) b(i, i) = 1.0 - m * eps;
  return BeliefMatrix(std::move(b));
}

}  // namespace bpperm
