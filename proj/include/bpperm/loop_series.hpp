#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "bpperm/bethe.hpp"
#include "bpperm/matrix.hpp"
#include "bpperm/permanent.hpp"

namespace bpperm {

// log z_LS = log perm(b .* (1-b)) - sum log(1-b). Requires interior beliefs
// (DomainError) and n <= cap (CapacityError).
LogValue z_ls_exact(const BeliefMatrix& beliefs, std::size_t cap = kDefaultExactCap);

// log perm(w) = log Z_BP + log z_LS for a converged interior solution.
LogValue permanent_via_bp(const WeightMatrix& w, const BPSolution& solution,
                          std::size_t cap = kDefaultExactCap);

// Largest order accepted by the generalized-loop enumeration.
inline constexpr std::size_t kMaxLoopEnumeration = 4;

// Edge subset of K_{n,n} in which every touched vertex has degree >= 2.
struct LoopSubset {
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (row, col), row-major order
  std::vector<std::size_t> row_degrees;                    // q_i, 0 for untouched rows
  std::vector<std::size_t> col_degrees;                    // q^j
  double weight = 0.0;                                     // r_C, set by loop_weight
};

// Calls fn for every non-empty generalized loop of K_{n,n}. Rows are filled
// one at a time and only with 0 or >= 2 edges; column degrees are checked
// at the end. Throws CapacityError for n > kMaxLoopEnumeration.
void for_each_generalized_loop(std::size_t n, const std::function<void(const LoopSubset&)>& fn);

// r_C = prod_i (1-q_i) prod_j (1-q^j) prod_{(i,j) in C} b/(1-b).
double loop_weight(const LoopSubset& loop, const BeliefMatrix& beliefs);

// 1 + sum of r_C over all generalized loops.
double z_ls_brute_series(const BeliefMatrix& beliefs);

// Directed edges of K_{n,n}: index i*n + j is row i -> column j, index
// n^2 + i*n + j is column j -> row i. Vertices are numbered rows 0..n-1,
// columns n..2n-1.
struct DirectedEdge {
  std::size_t tail;
  std::size_t head;
  std::size_t row;  // undirected edge (row, col)
  std::size_t col;
};

DirectedEdge directed_edge(std::size_t n, std::size_t index);

// Non-backtracking edge adjacency: M(e, f) = 1 when f ends where e starts
// and f is not the reverse of e.
SquareMatrix edge_adjacency(std::size_t n);

// Principal submatrix of edge_adjacency on both orientations of the loop's
// edges, in the global index order.
SquareMatrix edge_adjacency(std::size_t n, const LoopSubset& loop);

}  // namespace bpperm
