#pragma once

#include <cstddef>
#include <cstdint>

#include "bpperm/bethe.hpp"
#include "bpperm/matrix.hpp"

namespace bpperm {

struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(samples)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  // Mean imaginary part, for estimators whose samples are complex.
  double imag_mean = 0.0;
};

// Largest order for the exhaustive sign enumerations (2^(n^2) patterns).
inline constexpr std::size_t kMaxExhaustiveSigns = 4;
// Largest order for the directed-edge determinant (2n^2 rows).
inline constexpr std::size_t kMaxEdgeDeterminant = 6;

// Godsil-Gutman: perm(m) = E[det(sqrt(m) .* s)^2] for independent fair signs
// s_i^j. Signs are drawn by a counter-based generator keyed by
// (seed, sample, entry), so the result does not depend on `workers`.
EstimatorResult godsil_gutman_estimate(const SquareMatrix& m, std::uint64_t samples, std::uint64_t seed,
                                       unsigned workers = 1);

// Exact expectation over all 2^(n^2) sign patterns; std_error is 0.
EstimatorResult godsil_gutman_exhaustive(const SquareMatrix& m);

// z_LS = E[det(I - i B M)] with M the directed-edge adjacency of K_{n,n} and
// B = diag(sqrt(b/(1-b)) x), one fair sign x per undirected edge shared by
// both orientations. The statistic is the real part; imag_mean tracks the
// imaginary part. Requires interior beliefs and n <= kMaxEdgeDeterminant.
EstimatorResult edge_determinant_average(const BeliefMatrix& beliefs, std::uint64_t samples,
                                         std::uint64_t seed, unsigned workers = 1);

EstimatorResult edge_determinant_exhaustive(const BeliefMatrix& beliefs);

}  // namespace bpperm
