#include <algorithm>
#include <cmath>
#include <limits>

#include "bpperm/bounds.hpp"

namespace bpperm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Evaluation {
  double value;
  std::vector<double> gradient;
  SquareMatrix hessian;
};

SquareMatrix log_entries(const SquareMatrix& a) {
  SquareMatrix out(a.n());
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    const double x = a.values()[k];
    if (x < 0.0) throw DomainError("capacity requires a non-negative matrix");
    out.values()[k] = x > 0.0 ? std::log(x) : kNegInf;
  }
  return out;
}

double objective(const SquareMatrix& log_a, const std::vector<double>& y) {
  const std::size_t n = log_a.n();
  std::vector<double> terms(n);
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) terms[j] = log_a(i, j) + y[j];
    f += log_sum_exp(terms);
  }
  for (double v : y) f -= v;
  return f;
}

// Gradient g_j = sum_i pi_ij - 1 and Hessian diag(c) - sum_i pi_i pi_i^T,
// pi_ij = a_ij e^{y_j} / sum_k a_ik e^{y_k}.
Evaluation evaluate(const SquareMatrix& log_a, const std::vector<double>& y) {
  const std::size_t n = log_a.n();
  Evaluation ev{0.0, std::vector<double>(n, -1.0), SquareMatrix(n)};
  std::vector<double> terms(n), pi(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) terms[j] = log_a(i, j) + y[j];
    const double lse = log_sum_exp(terms);
    ev.value += lse;
    for (std::size_t j = 0; j < n; ++j) pi[j] = std::exp(terms[j] - lse);
    for (std::size_t j = 0; j < n; ++j) {
      ev.gradient[j] += pi[j];
      ev.hessian(j, j) += pi[j];
      for (std::size_t k = 0; k < n; ++k) ev.hessian(j, k) -= pi[j] * pi[k];
    }
  }
  for (double v : y) ev.value -= v;
  return ev;
}

// Solves (h) x = rhs by Gaussian elimination with partial pivoting; returns
// false if the system is numerically singular.
bool solve_linear(SquareMatrix h, std::vector<double> rhs, std::vector<double>& x) {
  const std::size_t n = h.n();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(h(i, k)) > std::abs(h(piv, k))) piv = i;
    if (std::abs(h(piv, k)) < 1e-300) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(k, j), h(piv, j));
      std::swap(rhs[k], rhs[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = h(i, k) / h(k, k);
      for (std::size_t j = k; j < n; ++j) h(i, j) -= f * h(k, j);
      rhs[i] -= f * rhs[k];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= h(k, j) * x[j];
    x[k] = s / h(k, k);
  }
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double capacity_objective(const SquareMatrix& a, const std::vector<double>& y) {
  return objective(log_entries(a), y);
}

CapacityResult capacity(const SquareMatrix& a, double tol, std::size_t max_iterations) {
  const std::size_t n = a.n();
  const SquareMatrix log_a = log_entries(a);
  CapacityResult result;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = log_a.row(i);
    if (std::all_of(r.begin(), r.end(), [](double x) { return x == kNegInf; })) {
      result.log_capacity = kNegInf;
      result.minimizer.assign(n, 1.0);
      result.converged = true;
      return result;
    }
  }

  // Damped Newton in y. The objective is invariant under y + c*1 and the
  // gradient is orthogonal to 1, so 11^T/n is added to the Hessian to fix
  // that direction; a small ridge handles reducible matrices.
  std::vector<double> y(n, 0.0);
  Evaluation ev = evaluate(log_a, y);
  std::size_t it = 0;
  for (; it < max_iterations && inf_norm(ev.gradient) > tol; ++it) {
    SquareMatrix h = ev.hessian;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) h(j, k) += 1.0 / static_cast<double>(n);
      h(j, j) += 1e-12;
    }
    std::vector<double> neg_g(n), step;
    for (std::size_t j = 0; j < n; ++j) neg_g[j] = -ev.gradient[j];
    double slope = 0.0;
    if (solve_linear(h, neg_g, step)) {
      for (std::size_t j = 0; j < n; ++j) slope += ev.gradient[j] * step[j];
    }
    if (step.size() != n || !(slope < 0.0)) {
      step = neg_g;
      slope = 0.0;
      for (double g : ev.gradient) slope -= g * g;
    }

    // Backtracking line search (Armijo); near the optimum rounding can hide
    // the decrease, in which case a step that shrinks the gradient is taken.
    double t = 1.0;
    bool accepted = false;
    Evaluation next;
    std::vector<double> trial(n);
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = y[j] + t * step[j];
      next = evaluate(log_a, trial);
      const double slack = 1e-14 * std::max(1.0, std::abs(ev.value));
      if (next.value <= ev.value + 1e-4 * t * slope + slack ||
          (next.value <= ev.value + slack && inf_norm(next.gradient) < inf_norm(ev.gradient))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    y = trial;
    ev = std::move(next);
  }

  result.iterations = it;
  result.gradient_norm = inf_norm(ev.gradient);
  result.converged = result.gradient_norm <= tol;
  result.log_capacity = ev.value;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  result.minimizer.resize(n);
  for (std::size_t j = 0; j < n; ++j) result.minimizer[j] = std::exp(y[j] - mean);
  return result;
}

}  // namespace bpperm
