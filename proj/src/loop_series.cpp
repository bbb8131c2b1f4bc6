#include "bpperm/loop_series.hpp"

#include <bit>
#include <cmath>

namespace bpperm {

LogValue z_ls_exact(const BeliefMatrix& beliefs, std::size_t cap) {
  if (!beliefs.interior()) throw DomainError("z_LS requires interior beliefs");
  const std::size_t n = beliefs.n();
  if (n > cap) {
    throw CapacityError("z_LS exact limited to n <= " + std::to_string(cap) + "; use an estimator");
  }
  SquareMatrix v(n);
  double log_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = beliefs(i, j);
      v(i, j) = b * (1.0 - b);
      log_norm += std::log1p(-b);
    }
  }
  const LogValue perm = permanent_exact(v, cap);
  return LogValue::from_log(perm.log_magnitude - log_norm, perm.sign);
}

LogValue permanent_via_bp(const WeightMatrix& w, const BPSolution& solution, std::size_t cap) {
  if (!solution.converged || !solution.interior) {
    throw DomainError("permanent via BP requires a converged interior solution");
  }
  if (solution.beliefs.n() != w.n()) throw ShapeError("solution and weights differ in order");
  const LogValue z = z_ls_exact(solution.beliefs, cap);
  return LogValue::from_log(solution.log_z_bp + z.log_magnitude, z.sign);
}

void for_each_generalized_loop(std::size_t n, const std::function<void(const LoopSubset&)>& fn) {
  if (n > kMaxLoopEnumeration) {
    throw CapacityError("generalized-loop enumeration limited to n <= " +
                        std::to_string(kMaxLoopEnumeration));
  }
  const unsigned full = 1u << n;
  std::vector<unsigned> row_masks;
  for (unsigned m = 0; m < full; ++m)
    if (std::popcount(m) != 1) row_masks.push_back(m);

  std::vector<unsigned> choice(n, 0);
  std::vector<std::size_t> col_deg(n, 0);
  LoopSubset loop;

  std::function<void(std::size_t)> fill = [&](std::size_t row) {
    if (row == n) {
      bool any = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (col_deg[j] == 1) return;
        any = any || col_deg[j] > 0;
      }
      if (!any) return;
      loop.edges.clear();
      loop.row_degrees.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        loop.row_degrees[i] = static_cast<std::size_t>(std::popcount(choice[i]));
        for (std::size_t j = 0; j < n; ++j)
          if (choice[i] >> j & 1u) loop.edges.emplace_back(i, j);
      }
      loop.col_degrees = col_deg;
      fn(loop);
      return;
    }
    for (unsigned m : row_masks) {
      choice[row] = m;
      for (std::size_t j = 0; j < n; ++j) col_deg[j] += m >> j & 1u;
      fill(row + 1);
      for (std::size_t j = 0; j < n; ++j) col_deg[j] -= m >> j & 1u;
    }
  };
  fill(0);
}

double loop_weight(const LoopSubset& loop, const BeliefMatrix& beliefs) {
  double r = 1.0;
  for (std::size_t q : loop.row_degrees) r *= 1.0 - static_cast<double>(q);
  for (std::size_t q : loop.col_degrees) r *= 1.0 - static_cast<double>(q);
  for (const auto& [i, j] : loop.edges) r *= beliefs(i, j) / (1.0 - beliefs(i, j));
  return r;
}

double z_ls_brute_series(const BeliefMatrix& beliefs) {
  if (!beliefs.interior()) throw DomainError("loop series requires interior beliefs");
  double z = 1.0;
  for_each_generalized_loop(beliefs.n(), [&](const LoopSubset& c) { z += loop_weight(c, beliefs); });
  return z;
}

DirectedEdge directed_edge(std::size_t n, std::size_t index) {
  const std::size_t e = index % (n * n);
  const std::size_t i = e / n, j = e % n;
  if (index < n * n) return {i, n + j, i, j};
  return {n + j, i, i, j};
}

SquareMatrix edge_adjacency(std::size_t n) {
  const std::size_t m = 2 * n * n;
  SquareMatrix out(m);
  for (std::size_t a = 0; a < m; ++a) {
    const DirectedEdge e = directed_edge(n, a);
    for (std::size_t b = 0; b < m; ++b) {
      const DirectedEdge f = directed_edge(n, b);
      if (f.head == e.tail && f.tail != e.head) out(a, b) = 1.0;
    }
  }
  return out;
}

SquareMatrix edge_adjacency(std::size_t n, const LoopSubset& loop) {
  std::vector<std::size_t> idx;
  for (const auto& [i, j] : loop.edges) idx.push_back(i * n + j);
  for (const auto& [i, j] : loop.edges) idx.push_back(n * n + i * n + j);
  const SquareMatrix full = edge_adjacency(n);
  SquareMatrix out(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = full(idx[a], idx[b]);
  return out;
}

}  // namespace bpperm
