#include <algorithm>
#include <cmath>
#include <limits>

#include "bpperm/bounds.hpp"
#include "bpperm/loop_series.hpp"

namespace bpperm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(n! / n^n)
double log_van_der_waerden(std::size_t n) {
  const double dn = static_cast<double>(n);
  return std::lgamma(dn + 1.0) - dn * std::log(dn);
}

SquareMatrix edge_variances(const BeliefMatrix& beliefs) {
  SquareMatrix v(beliefs.n());
  for (std::size_t k = 0; k < v.values().size(); ++k) {
    const double b = beliefs.matrix().values()[k];
    v.values()[k] = b * (1.0 - b);
  }
  return v;
}

double sum_log_complement(const BeliefMatrix& beliefs) {
  double s = 0.0;
  for (double b : beliefs.matrix().values()) s += std::log1p(-b);
  return s;
}

}  // namespace

double lower_bound_capacity(const SquareMatrix& a) {
  return capacity(a).log_capacity + log_van_der_waerden(a.n());
}

double lower_bound_beliefs(const BeliefMatrix& beliefs) {
  double s = log_van_der_waerden(beliefs.n());
  for (double b : beliefs.matrix().values())
    if (b > 0.0) s += b * std::log1p(-b);
  return s;
}

double lower_bound_matching(const BeliefMatrix& beliefs, const std::optional<Matching>& pi) {
  const std::size_t n = beliefs.n();
  std::vector<std::size_t> perm;
  if (pi) {
    perm = pi->perm;
    if (perm.size() != n) throw ShapeError("matching order differs from beliefs");
  } else {
    SquareMatrix log_v(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double b = beliefs(i, j);
        log_v(i, j) = b > 0.0 && b < 1.0 ? std::log(b) + std::log1p(-b) : kNegInf;
      }
    try {
      perm = max_weight_matching(log_v).perm;
    } catch (const InfeasibleError&) {
      return kNegInf;
    }
  }
  double s = std::log(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = beliefs(i, perm[i]);
    if (b <= 0.0 || b >= 1.0) return kNegInf;
    s += std::log(b) + std::log1p(-b);
  }
  return s;
}

double upper_bound_hadamard(const BeliefMatrix& beliefs) {
  const std::size_t n = beliefs.n();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += beliefs(i, j) * beliefs(i, j);
    const double factor = 1.0 - sq;
    if (factor <= 0.0) return kNegInf;
    s += std::log(factor);
  }
  return s;
}

double capacity_invariance_check(const WeightMatrix& w, const BPSolution& solution) {
  if (!solution.converged || !solution.interior) {
    throw DomainError("capacity invariance requires a converged interior solution");
  }
  // Row-normalize the weights first; Mcap scales by the product of the row
  // factors, which is added back in log domain.
  const SquareMatrix log_w = w.log_scaled();
  const std::size_t n = w.n();
  SquareMatrix scaled(n);
  double log_rows = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = log_w.row(i);
    const double top = *std::max_element(r.begin(), r.end());
    log_rows += top;
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) = std::exp(log_w(i, j) - top);
  }
  const double lhs = capacity(scaled).log_capacity + log_rows;
  const double rhs = solution.log_z_bp + capacity(edge_variances(solution.beliefs)).log_capacity -
                     sum_log_complement(solution.beliefs);
  return std::abs(lhs - rhs);
}

BoundsReport bounds_report(const BeliefMatrix& beliefs, std::size_t cap) {
  BoundsReport r;
  if (!beliefs.interior()) {
    r.degenerate = true;
    r.log_z_ls_exact = 0.0;
    return r;
  }
  const double shift = -sum_log_complement(beliefs);
  r.log_lb_capacity = lower_bound_capacity(edge_variances(beliefs)) + shift;
  r.log_lb_beliefs = lower_bound_beliefs(beliefs) + shift;
  r.log_lb_matching = lower_bound_matching(beliefs) + shift;
  r.log_ub_hadamard = upper_bound_hadamard(beliefs) + shift;
  if (beliefs.n() <= cap) r.log_z_ls_exact = z_ls_exact(beliefs, cap).log_magnitude;

  const double lower = std::max({r.log_lb_capacity, r.log_lb_beliefs, r.log_lb_matching});
  if (r.log_z_ls_exact) {
    r.sandwich_ok = lower <= *r.log_z_ls_exact + kSandwichSlack &&
                    *r.log_z_ls_exact <= r.log_ub_hadamard + kSandwichSlack;
  } else {
    r.sandwich_ok = lower <= r.log_ub_hadamard + kSandwichSlack;
  }
  return r;
}

}  // namespace bpperm
