#pragma once

#include <cstddef>
#include <vector>

#include "bpperm/matrix.hpp"

namespace bpperm {

struct CriticalSearch {
  double t_min = 0.01;
  double t_max = 100.0;
  std::size_t grid = 400;  // log-spaced samples between t_min and t_max
  double tol = 1e-12;      // bisection width
};

struct DetSample {
  double temperature;
  int sign;
  double log_abs;
};

struct CriticalReport {
  double t_critical = 0.0;
  Matching ml;
  std::vector<DetSample> det_values;
  std::vector<double> roots;  // every root found in the window, ascending
};

// Largest temperature in the window where det A(T) changes sign, with
// A_i^j = (p_i^j)^(1/T) off the ML matching and -(p_i^j)^(1/T) on it.
// Columns are permuted so the ML matching is the diagonal and each row is
// divided by its largest entry before taking the determinant.
// Errors: DomainError for non-positive weights, DegeneracyError when the ML
// matching is not unique, NotFoundError without a sign change.
CriticalReport critical_temperature(const WeightMatrix& w, const CriticalSearch& search = {});

}  // namespace bpperm
