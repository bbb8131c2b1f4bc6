#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bpperm/errors.hpp"

namespace bpperm {

inline constexpr double kInfiniteTemperature = std::numeric_limits<double>::infinity();

// Dense row-major n x n matrix.
template <class T>
class Square {
 public:
  Square() = default;
  explicit Square(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  static Square identity(std::size_t n) {
    Square m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  // Throws ShapeError unless every row has rows.size() entries.
  static Square from_rows(const std::vector<std::vector<T>>& rows) {
    Square m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) {
        throw ShapeError("row " + std::to_string(i + 1) + " has " +
                         std::to_string(rows[i].size()) + " entries, expected " +
                         std::to_string(rows.size()));
      }
      for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t n() const { return n_; }
  bool empty() const { return n_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool operator==(const Square&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using SquareMatrix = Square<double>;
using ComplexMatrix = Square<std::complex<double>>;

// Signed value stored as (sign, log|x|). Zero is sign 0 with log_magnitude -inf.
struct LogValue {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogValue zero() { return {}; }
  static LogValue from_log(double log_magnitude, int sign = 1);
  static LogValue from_double(double x);

  bool is_zero() const { return sign == 0; }
  double to_double() const;

  friend LogValue operator*(LogValue a, LogValue b);
  friend LogValue operator/(LogValue a, LogValue b);
};

// Non-negative weights p with a temperature T; the scaled view is w = p^(1/T).
class WeightMatrix {
 public:
  // Throws DomainError on a negative or non-finite entry, an empty matrix,
  // or a temperature that is not positive.
  explicit WeightMatrix(SquareMatrix p, double temperature = 1.0);

  std::size_t n() const { return p_.n(); }
  const SquareMatrix& raw() const { return p_; }
  double temperature() const { return temperature_; }
  bool infinite_temperature() const { return temperature_ == kInfiniteTemperature; }

  WeightMatrix with_temperature(double t) const { return WeightMatrix(p_, t); }

  // log w_i^j; -inf where p_i^j = 0. At infinite temperature every positive
  // weight maps to 1.
  double log_scaled(std::size_t i, std::size_t j) const;
  SquareMatrix log_scaled() const;
  SquareMatrix scaled() const;

  bool strictly_positive() const;

 private:
  SquareMatrix p_;
  double temperature_;
};

struct Matching {
  std::vector<std::size_t> perm;  // perm[row] = column
  double log_weight = 0.0;
  // False when another perfect matching attains the same weight (ties are
  // broken by the assignment solver's deterministic order).
  bool unique = true;
};

// Entrywise product of two matrices of the same order.
SquareMatrix hadamard(const SquareMatrix& a, const SquareMatrix& b);

// Stable log(sum(exp(x))).
double log_sum_exp(std::span<const double> xs);

}  // namespace bpperm
