#pragma once

#include <cstddef>
#include <vector>

#include "bpperm/matrix.hpp"

namespace bpperm {

// Largest k whose derangement count is representable as a double.
inline constexpr std::size_t kMaxDirectDerangement = 170;

// D_0..D_kmax from D_k = (k-1)(D_{k-1} + D_{k-2}), D_0 = 1, D_1 = 0.
// Throws CapacityError for k_max > kMaxDirectDerangement.
std::vector<double> derangement_numbers(std::size_t k_max);

// log D_0..log D_kmax; log D_1 = -inf. Values up to k = 170 come from the
// direct recursion, beyond that the recursion runs in log domain.
std::vector<double> log_derangement_numbers(std::size_t k_max);

// p_i^i = big_w, p_i^j = 1 otherwise; temperature 1. Requires n >= 2 and
// big_w > 1 (DomainError otherwise).
WeightMatrix homogeneous_instance(std::size_t n, double big_w);

// log Z = log sum_k W^((n-k)/T) C(n,k) D_k; T may be infinite.
double homogeneous_log_z(std::size_t n, double big_w, double temperature);

}  // namespace bpperm
