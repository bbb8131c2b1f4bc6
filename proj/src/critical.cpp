#include "bpperm/critical.hpp"

#include <algorithm>
#include <cmath>

#include "bpperm/permanent.hpp"

namespace bpperm {

namespace {

class CriticalMatrix {
 public:
  CriticalMatrix(const SquareMatrix& p, const std::vector<std::size_t>& perm) : log_p_(p.n()) {
    for (std::size_t i = 0; i < p.n(); ++i)
      for (std::size_t j = 0; j < p.n(); ++j) log_p_(i, j) = std::log(p(i, perm[j]));
  }

  DetSample sample(double t) const {
    const std::size_t n = log_p_.n();
    SquareMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) top = std::max(top, log_p_(i, j) / t);
      for (std::size_t j = 0; j < n; ++j) {
        const double x = std::exp(log_p_(i, j) / t - top);
        a(i, j) = i == j ? -x : x;
      }
    }
    const LogValue d = determinant(a);
    return {t, d.sign, d.log_magnitude};
  }

 private:
  SquareMatrix log_p_;
};

}  // namespace

CriticalReport critical_temperature(const WeightMatrix& w, const CriticalSearch& search) {
  if (!w.strictly_positive()) throw DomainError("critical temperature requires positive weights");
  if (!(search.t_min > 0.0 && search.t_max > search.t_min && search.grid >= 2)) {
    throw DomainError("invalid critical temperature search window");
  }
  const WeightMatrix unit(w.raw(), 1.0);
  CriticalReport report;
  report.ml = ml_matching(unit);
  if (!report.ml.unique) throw DegeneracyError("maximum-likelihood matching is not unique");

  const CriticalMatrix a(w.raw(), report.ml.perm);
  const double ratio = std::log(search.t_max / search.t_min) / static_cast<double>(search.grid - 1);
  for (std::size_t g = 0; g < search.grid; ++g) {
    const double t = g + 1 == search.grid ? search.t_max : search.t_min * std::exp(ratio * g);
    report.det_values.push_back(a.sample(t));
  }

  const auto& s = report.det_values;
  for (std::size_t g = 0; g < s.size(); ++g) {
    if (s[g].sign == 0) {
      report.roots.push_back(s[g].temperature);
      continue;
    }
    if (g + 1 == s.size() || s[g + 1].sign == 0 || s[g + 1].sign == s[g].sign) continue;
    double lo = s[g].temperature, hi = s[g + 1].temperature;
    const int sign_lo = s[g].sign;
    while (hi - lo > search.tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const DetSample m = a.sample(mid);
      if (m.sign == 0) {
        lo = hi = mid;
        break;
      }
      (m.sign == sign_lo ? lo : hi) = mid;
    }
    report.roots.push_back(0.5 * (lo + hi));
  }
  if (report.roots.empty()) {
    throw NotFoundError("determinant keeps its sign on [" + std::to_string(search.t_min) + ", " +
                        std::to_string(search.t_max) + "]");
  }
  std::sort(report.roots.begin(), report.roots.end());
  report.t_critical = report.roots.back();
  return report;
}

}  // namespace bpperm
