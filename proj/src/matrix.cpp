#include "bpperm/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace bpperm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LogValue LogValue::from_log(double log_magnitude, int sign) {
  if (sign == 0 || log_magnitude == kNegInf) return zero();
  return {log_magnitude, sign > 0 ? 1 : -1};
}

LogValue LogValue::from_double(double x) {
  if (x == 0.0) return zero();
  return {std::log(std::abs(x)), x > 0 ? 1 : -1};
}

double LogValue::to_double() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_magnitude);
}

LogValue operator*(LogValue a, LogValue b) {
  if (a.is_zero() || b.is_zero()) return LogValue::zero();
  return {a.log_magnitude + b.log_magnitude, a.sign * b.sign};
}

LogValue operator/(LogValue a, LogValue b) {
  if (b.is_zero()) throw DomainError("division by a zero LogValue");
  if (a.is_zero()) return LogValue::zero();
  return {a.log_magnitude - b.log_magnitude, a.sign * b.sign};
}

WeightMatrix::WeightMatrix(SquareMatrix p, double temperature)
    : p_(std::move(p)), temperature_(temperature) {
  if (p_.empty()) throw DomainError("weight matrix must have order n >= 1");
  if (!(temperature_ > 0.0)) throw DomainError("temperature must be positive");
  for (double v : p_.values()) {
    if (!std::isfinite(v)) throw DomainError("weight matrix entries must be finite");
    if (v < 0.0) throw DomainError("weight matrix entries must be non-negative");
  }
}

double WeightMatrix::log_scaled(std::size_t i, std::size_t j) const {
  const double v = p_(i, j);
  if (v == 0.0) return kNegInf;
  if (infinite_temperature()) return 0.0;
  return std::log(v) / temperature_;
}

SquareMatrix WeightMatrix::log_scaled() const {
  SquareMatrix out(n());
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = 0; j < n(); ++j) out(i, j) = log_scaled(i, j);
  return out;
}

SquareMatrix WeightMatrix::scaled() const {
  SquareMatrix out(n());
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = 0; j < n(); ++j) out(i, j) = std::exp(log_scaled(i, j));
  return out;
}

bool WeightMatrix::strictly_positive() const {
  return std::all_of(p_.values().begin(), p_.values().end(), [](double v) { return v > 0.0; });
}

SquareMatrix hadamard(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.n() != b.n()) throw ShapeError("hadamard: order mismatch");
  SquareMatrix out(a.n());
  auto o = out.values();
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = av[k] * bv[k];
  return out;
}

double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  if (hi == std::numeric_limits<double>::infinity()) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

}  // namespace bpperm
