#include <algorithm>
#include <cmath>
#include <limits>

#include "bpperm/permanent.hpp"

namespace bpperm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Min-cost assignment by the Hungarian method with row/column potentials.
// Returns assignment[row] = column.
std::vector<std::size_t> hungarian(const SquareMatrix& cost) {
  const std::size_t n = cost.n();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

struct Solved {
  std::vector<std::size_t> perm;
  double log_weight;
  bool feasible;
};

// Forbidden entries get a cost large enough that any matching using one is
// worse than every matching that avoids them.
Solved solve(const SquareMatrix& log_w) {
  const std::size_t n = log_w.n();
  double lo = kInf, hi = -kInf;
  for (double x : log_w.values()) {
    if (x == -kInf) continue;
    lo = std::min(lo, -x);
    hi = std::max(hi, -x);
  }
  if (lo == kInf) return {{}, -kInf, false};
  const double big = hi + static_cast<double>(n + 1) * (hi - lo + 1.0);
  SquareMatrix cost(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost(i, j) = log_w(i, j) == -kInf ? big : -log_w(i, j);

  Solved out{hungarian(cost), 0.0, true};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = log_w(i, out.perm[i]);
    if (x == -kInf) out.feasible = false;
    out.log_weight += x;
  }
  return out;
}

}  // namespace

Matching max_weight_matching(const SquareMatrix& log_w) {
  const std::size_t n = log_w.n();
  Solved best = solve(log_w);
  if (!best.feasible) throw InfeasibleError("no perfect matching with all-positive weights");

  Matching m{best.perm, best.log_weight, true};
  const double tol = 1e-9 * std::max(1.0, std::abs(best.log_weight));
  SquareMatrix banned = log_w;
  for (std::size_t i = 0; i < n && m.unique; ++i) {
    const std::size_t j = best.perm[i];
    banned(i, j) = -kInf;
    const Solved alt = solve(banned);
    if (alt.feasible && alt.log_weight >= best.log_weight - tol) m.unique = false;
    banned(i, j) = log_w(i, j);
  }
  return m;
}

Matching ml_matching(const WeightMatrix& w) { return max_weight_matching(w.log_scaled()); }

}  // namespace bpperm
