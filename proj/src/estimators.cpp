#include "bpperm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bpperm/loop_series.hpp"
#include "bpperm/parallel.hpp"
#include "bpperm/permanent.hpp"
#include "bpperm/random.hpp"

namespace bpperm {

namespace {

constexpr std::uint32_t kGodsilGutmanStream = 1;
constexpr std::uint32_t kEdgeDeterminantStream = 2;

template <class T, class F>
std::vector<T> evaluate_all(std::uint64_t samples, unsigned workers, F f) {
  std::vector<T> out(samples);
  parallel_for(samples, workers, [&](std::uint64_t s) { out[s] = f(s); });
  return out;
}

EstimatorResult summarize(const std::vector<double>& xs, std::uint64_t seed) {
  EstimatorResult r;
  r.samples = xs.size();
  r.seed = seed;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    r.std_error = sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return r;
}

SquareMatrix sqrt_entries(const SquareMatrix& m) {
  SquareMatrix out(m.n());
  for (std::size_t k = 0; k < m.values().size(); ++k) {
    if (m.values()[k] < 0.0) throw DomainError("Godsil-Gutman requires a non-negative matrix");
    out.values()[k] = std::sqrt(m.values()[k]);
  }
  return out;
}

double signed_det_squared(const SquareMatrix& root, auto&& sign_of) {
  SquareMatrix a = root;
  for (std::size_t k = 0; k < a.values().size(); ++k) a.values()[k] *= sign_of(k);
  const LogValue d = determinant(a);
  return d.is_zero() ? 0.0 : std::exp(2.0 * d.log_magnitude);
}

class EdgeDeterminant {
 public:
  explicit EdgeDeterminant(const BeliefMatrix& beliefs) : n_(beliefs.n()), adjacency_(edge_adjacency(n_)) {
    weight_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        weight_[i * n_ + j] = std::sqrt(beliefs(i, j) / (1.0 - beliefs(i, j)));
  }

  // det(I - i B M) for signs x_e, e = i*n + j.
  template <class Sign>
  std::complex<double> operator()(Sign&& sign_of) const {
    const std::size_t m = adjacency_.n();
    const std::size_t half = n_ * n_;
    ComplexMatrix g(m);
    for (std::size_t a = 0; a < m; ++a) {
      const std::size_t e = a % half;
      const double b = weight_[e] * sign_of(e);
      for (std::size_t c = 0; c < m; ++c) {
        const double x = adjacency_(a, c);
        g(a, c) = std::complex<double>(a == c ? 1.0 : 0.0, x == 0.0 ? 0.0 : -b * x);
      }
    }
    return determinant(g);
  }

 private:
  std::size_t n_;
  SquareMatrix adjacency_;
  std::vector<double> weight_;
};

void check_interior(const BeliefMatrix& beliefs) {
  if (!beliefs.interior()) throw DomainError("edge determinant requires interior beliefs");
  if (beliefs.n() > kMaxEdgeDeterminant) {
    throw CapacityError("edge determinant limited to n <= " + std::to_string(kMaxEdgeDeterminant));
  }
}

EstimatorResult summarize_complex(const std::vector<std::complex<double>>& zs, std::uint64_t seed) {
  std::vector<double> re(zs.size());
  double im = 0.0;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    re[k] = zs[k].real();
    im += zs[k].imag();
  }
  EstimatorResult r = summarize(re, seed);
  if (!zs.empty()) r.imag_mean = im / static_cast<double>(zs.size());
  return r;
}

}  // namespace

EstimatorResult godsil_gutman_estimate(const SquareMatrix& m, std::uint64_t samples, std::uint64_t seed,
                                       unsigned workers) {
  if (samples == 0) throw DomainError("estimator needs at least one sample");
  const SquareMatrix root = sqrt_entries(m);
  const CounterRng rng(seed, kGodsilGutmanStream);
  const auto values = evaluate_all<double>(samples, workers, [&](std::uint64_t s) {
    return signed_det_squared(root, [&](std::size_t k) {
      return static_cast<double>(rng.sign(s, static_cast<std::uint32_t>(k)));
    });
  });
  return summarize(values, seed);
}

EstimatorResult godsil_gutman_exhaustive(const SquareMatrix& m) {
  if (m.n() > kMaxExhaustiveSigns) {
    throw CapacityError("exhaustive sign enumeration limited to n <= " + std::to_string(kMaxExhaustiveSigns));
  }
  const SquareMatrix root = sqrt_entries(m);
  const std::uint64_t patterns = std::uint64_t{1} << (m.n() * m.n());
  double sum = 0.0;
  for (std::uint64_t p = 0; p < patterns; ++p) {
    sum += signed_det_squared(root, [&](std::size_t k) { return (p >> k & 1u) ? -1.0 : 1.0; });
  }
  EstimatorResult r;
  r.mean = sum / static_cast<double>(patterns);
  r.samples = patterns;
  return r;
}

EstimatorResult edge_determinant_average(const BeliefMatrix& beliefs, std::uint64_t samples,
                                         std::uint64_t seed, unsigned workers) {
  check_interior(beliefs);
  if (samples == 0) throw DomainError("estimator needs at least one sample");
  const EdgeDeterminant det(beliefs);
  const CounterRng rng(seed, kEdgeDeterminantStream);
  const auto values = evaluate_all<std::complex<double>>(samples, workers, [&](std::uint64_t s) {
    return det([&](std::size_t e) { return static_cast<double>(rng.sign(s, static_cast<std::uint32_t>(e))); });
  });
  return summarize_complex(values, seed);
}

EstimatorResult edge_determinant_exhaustive(const BeliefMatrix& beliefs) {
  check_interior(beliefs);
  if (beliefs.n() > kMaxExhaustiveSigns) {
    throw CapacityError("exhaustive sign enumeration limited to n <= " + std::to_string(kMaxExhaustiveSigns));
  }
  const EdgeDeterminant det(beliefs);
  const std::uint64_t patterns = std::uint64_t{1} << (beliefs.n() * beliefs.n());
  std::complex<double> sum = 0.0;
  for (std::uint64_t p = 0; p < patterns; ++p) {
    sum += det([&](std::size_t e) { return (p >> e & 1u) ? -1.0 : 1.0; });
  }
  EstimatorResult r;
  r.mean = sum.real() / static_cast<double>(patterns);
  r.imag_mean = sum.imag() / static_cast<double>(patterns);
  r.samples = patterns;
  return r;
}

}  // namespace bpperm
