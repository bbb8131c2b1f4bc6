#include "bpperm/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

namespace bpperm {

LogValue permanent_exact(const SquareMatrix& m, std::size_t cap) {
  const std::size_t n = m.n();
  if (n > cap) {
    throw CapacityError("exact permanent limited to n <= " + std::to_string(cap) + ", got n = " +
                        std::to_string(n));
  }
  if (n == 0) return LogValue::from_log(0.0);

  bool non_negative = true;
  double log_scale = 0.0;
  std::vector<long double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double big = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      big = std::max(big, std::abs(m(i, j)));
      if (m(i, j) < 0.0) non_negative = false;
    }
    if (big == 0.0) return LogValue::zero();
    log_scale += std::log(big);
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = static_cast<long double>(m(i, j)) / big;
  }

  // sum over column subsets S of (-1)^|S| prod_i sum_{j in S} a_ij, visited
  // in Gray-code order so each step toggles a single column.
  std::vector<long double> row_sum(n, 0.0L);
  long double total = 0.0L;
  std::vector<bool> in_set(n, false);
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const auto col = static_cast<std::size_t>(std::countr_zero(k));
    const bool add = !in_set[col];
    in_set[col] = add;
    for (std::size_t i = 0; i < n; ++i) {
      if (add) {
        row_sum[i] += a[i * n + col];
      } else {
        row_sum[i] -= a[i * n + col];
      }
    }
    long double prod = 1.0L;
    for (std::size_t i = 0; i < n; ++i) prod *= row_sum[i];
    // Gray code k has popcount(k ^ (k >> 1)) members.
    const bool odd = std::popcount(k ^ (k >> 1)) % 2 == 1;
    total += odd ? -prod : prod;
  }
  if (n % 2 == 1) total = -total;

  if (total == 0.0L || (non_negative && total < 0.0L)) return LogValue::zero();
  const int sign = total > 0 ? 1 : -1;
  return LogValue::from_log(log_scale + static_cast<double>(std::log(std::abs(total))),
                            sign);
}

LogValue permanent_exact(const WeightMatrix& w, std::size_t cap) {
  const std::size_t n = w.n();
  if (n > cap) {
    throw CapacityError("exact permanent limited to n <= " + std::to_string(cap) + ", got n = " +
                        std::to_string(n));
  }
  const SquareMatrix log_w = w.log_scaled();
  SquareMatrix normalized(n);
  double log_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = log_w.row(i);
    const double top = *std::max_element(r.begin(), r.end());
    if (std::isinf(top)) return LogValue::zero();
    log_scale += top;
    for (std::size_t j = 0; j < n; ++j) normalized(i, j) = std::exp(log_w(i, j) - top);
  }
  const LogValue p = permanent_exact(normalized, cap);
  if (p.is_zero()) return p;
  return LogValue::from_log(p.log_magnitude + log_scale, p.sign);
}

LogValue determinant(const SquareMatrix& m) {
  const std::size_t n = m.n();
  if (n == 0) return LogValue::from_log(0.0);
  SquareMatrix a = m;
  double max_abs = 0.0;
  for (double v : a.values()) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) return LogValue::zero();
  const double threshold = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_abs;

  int sign = 1;
  double log_abs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= threshold) return LogValue::zero();
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      sign = -sign;
    }
    const double p = a(k, k);
    if (p < 0) sign = -sign;
    log_abs += std::log(std::abs(p));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / p;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return LogValue::from_log(log_abs, sign);
}

std::complex<double> determinant(const ComplexMatrix& m) {
  const std::size_t n = m.n();
  ComplexMatrix a = m;
  std::complex<double> det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    const auto p = a(k, k);
    det *= p;
    for (std::size_t i = k + 1; i < n; ++i) {
      const auto f = a(i, k) / p;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

}  // namespace bpperm
