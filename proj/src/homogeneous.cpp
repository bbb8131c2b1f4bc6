#include "bpperm/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bpperm {

std::vector<double> derangement_numbers(std::size_t k_max) {
  if (k_max > kMaxDirectDerangement) {
    throw CapacityError("derangement numbers beyond k = 170 overflow a double; use the log form");
  }
  std::vector<long double> d(k_max + 1);
  d[0] = 1.0L;
  if (k_max >= 1) d[1] = 0.0L;
  for (std::size_t k = 2; k <= k_max; ++k) d[k] = static_cast<long double>(k - 1) * (d[k - 1] + d[k - 2]);
  return {d.begin(), d.end()};
}

std::vector<double> log_derangement_numbers(std::size_t k_max) {
  const std::size_t direct = std::min(k_max, kMaxDirectDerangement);
  const auto d = derangement_numbers(direct);
  std::vector<double> out(k_max + 1);
  for (std::size_t k = 0; k <= direct; ++k) out[k] = std::log(d[k]);
  for (std::size_t k = direct + 1; k <= k_max; ++k) {
    const double terms[] = {out[k - 1], out[k - 2]};
    out[k] = std::log(static_cast<double>(k - 1)) + log_sum_exp(terms);
  }
  return out;
}

WeightMatrix homogeneous_instance(std::size_t n, double big_w) {
  if (n < 2) throw DomainError("homogeneous instance requires n >= 2");
  if (!(big_w > 1.0)) throw DomainError("homogeneous instance requires W > 1");
  SquareMatrix p(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) p(i, i) = big_w;
  return WeightMatrix(std::move(p), 1.0);
}

double homogeneous_log_z(std::size_t n, double big_w, double temperature) {
  if (n < 1) throw DomainError("homogeneous_log_z requires n >= 1");
  if (!(big_w > 1.0)) throw DomainError("homogeneous_log_z requires W > 1");
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  const auto log_d = log_derangement_numbers(n);
  const double log_w = std::isinf(temperature) ? 0.0 : std::log(big_w) / temperature;
  std::vector<double> terms;
  terms.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    terms.push_back(static_cast<double>(n - k) * log_w + log_binom + log_d[k]);
  }
  return log_sum_exp(terms);
}

}  // namespace bpperm
