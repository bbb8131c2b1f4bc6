#pragma once

#include <complex>
#include <cstddef>

#include "bpperm/matrix.hpp"

namespace bpperm {

inline constexpr std::size_t kDefaultExactCap = 25;

// Permanent by Ryser inclusion-exclusion with Gray-code column updates,
// O(2^n n). Rows are rescaled by their largest magnitude first and the
// scale restored in log domain. Throws CapacityError when n > cap.
LogValue permanent_exact(const SquareMatrix& m, std::size_t cap = kDefaultExactCap);

// Permanent of the temperature-scaled view w = p^(1/T). Rows are normalized
// in log domain, so large weights at small T do not overflow.
LogValue permanent_exact(const WeightMatrix& w, std::size_t cap = kDefaultExactCap);

// Sign and log|det| by partially pivoted elimination; a pivot below
// n * eps * max|m| makes the result zero.
LogValue determinant(const SquareMatrix& m);

std::complex<double> determinant(const ComplexMatrix& m);

// Maximum of sum log_w(i, perm(i)) over permutations, -inf entries forbidden.
// O(n^3) Hungarian method plus n re-solves to detect ties. Throws
// InfeasibleError when every permutation uses a forbidden entry.
Matching max_weight_matching(const SquareMatrix& log_w);

// Maximum-likelihood perfect matching of the temperature-scaled weights.
Matching ml_matching(const WeightMatrix& w);

}  // namespace bpperm
