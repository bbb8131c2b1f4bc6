#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "bpperm/homogeneous.hpp"
#include "bpperm/matrix_io.hpp"
#include "bpperm/permanent.hpp"
#include "oracles.hpp"

namespace bpperm {
namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("bpperm_mc_" + name);
  std::ofstream(path) << text;
  return path;
}

TEST(LoadMatrix, CsvAllOnes) {
  const auto w = load_matrix(write_temp("ones.csv", "1,1,1\n1,1,1\n1,1,1\n"), MatrixFormat::csv);
  EXPECT_EQ(w.n(), 3u);
  EXPECT_EQ(w.temperature(), 1.0);
  for (double x : w.raw().values()) EXPECT_EQ(x, 1.0);
}

TEST(LoadMatrix, JsonWithTemperature) {
  const auto w = load_matrix(write_temp("t.json", R"({"temperature": 0.5, "p": [[2,1],[1,2]]})"),
                             MatrixFormat::json);
  EXPECT_EQ(w.n(), 2u);
  EXPECT_EQ(w.temperature(), 0.5);
  EXPECT_EQ(w.raw()(0, 0), 2.0);
  EXPECT_EQ(w.raw()(0, 1), 1.0);
}

TEST(LoadMatrix, JsonInfiniteTemperature) {
  const auto w = parse_matrix(R"({"temperature": "inf", "p": [[2,1],[1,2]]})", MatrixFormat::json);
  EXPECT_TRUE(w.infinite_temperature());
  EXPECT_EQ(w.log_scaled(0, 0), 0.0);
}

TEST(LoadMatrix, Errors) {
  EXPECT_THROW(parse_matrix("1,-3\n1,1\n", MatrixFormat::csv), DomainError);
  EXPECT_THROW(parse_matrix("1,2,3\n1,1,1\n", MatrixFormat::csv), ShapeError);
  EXPECT_THROW(parse_matrix("1,x\n1,1\n", MatrixFormat::csv), ParseError);
  EXPECT_THROW(parse_matrix(R"({"p": [[1,2],[3]]})", MatrixFormat::json), ShapeError);
  EXPECT_THROW(parse_matrix("{not json", MatrixFormat::json), ParseError);
  EXPECT_THROW(load_matrix("/nonexistent/m.csv", MatrixFormat::csv), ParseError);
}

TEST(LoadMatrix, CsvRoundTrip) {
  const auto m = oracle::random_matrix(3, 4, 0.0, 5.0);
  const auto w = parse_matrix(to_csv(m), MatrixFormat::csv);
  EXPECT_EQ(w.raw(), m);
}

TEST(LoadMatrix, FormatGuess) {
  EXPECT_EQ(guess_matrix_format("a/b.json"), MatrixFormat::json);
  EXPECT_EQ(guess_matrix_format("a/b.csv"), MatrixFormat::csv);
  EXPECT_THROW(parse_matrix_format("xml"), ParseError);
}

TEST(WeightMatrix, ScaledView) {
  const WeightMatrix w(SquareMatrix::from_rows({{4, 0}, {1, 9}}), 0.5);
  EXPECT_DOUBLE_EQ(w.scaled()(0, 0), 16.0);
  EXPECT_EQ(w.scaled()(0, 1), 0.0);
  EXPECT_FALSE(w.strictly_positive());
  const auto inf = w.with_temperature(kInfiniteTemperature);
  EXPECT_EQ(inf.scaled()(1, 1), 1.0);
  EXPECT_EQ(inf.scaled()(0, 1), 0.0);
  EXPECT_THROW(WeightMatrix(SquareMatrix(2, 1.0), 0.0), DomainError);
  EXPECT_THROW(WeightMatrix{SquareMatrix{}}, DomainError);
}

TEST(Permanent, Examples) {
  EXPECT_NEAR(permanent_exact(SquareMatrix(3, 1.0)).log_magnitude, std::log(6.0), 1e-14);
  const auto id = permanent_exact(SquareMatrix::identity(4));
  EXPECT_EQ(id.sign, 1);
  EXPECT_NEAR(id.log_magnitude, 0.0, 1e-15);
  const auto h = permanent_exact(homogeneous_instance(4, 2.0));
  EXPECT_NEAR(h.log_magnitude, std::log(65.0), 1e-13);
  EXPECT_NEAR(oracle::permanent(homogeneous_instance(4, 2.0).scaled()), 65.0, 1e-12);
}

TEST(Permanent, ZeroAndCap) {
  EXPECT_TRUE(permanent_exact(SquareMatrix::from_rows({{0, 1}, {0, 1}})).is_zero());
  EXPECT_THROW(permanent_exact(SquareMatrix(5, 1.0), 4), CapacityError);
}

TEST(Permanent, MatchesPermutationSum) {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto m = oracle::random_matrix(100 * n + seed, n, 0.0, 3.0);
      if (seed == 4 && n > 1) m(0, 0) = 0.0;  // some zeros
      const double expected = std::log(oracle::permanent(m));
      EXPECT_NEAR(permanent_exact(m).log_magnitude, expected, 1e-10 * std::max(1.0, std::abs(expected)))
          << "n=" << n << " seed=" << seed;
    }
  }
}

TEST(Permanent, InvariantUnderRowAndColumnPermutation) {
  std::mt19937_64 gen(11);
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto m = oracle::random_matrix(n, n, 0.0, 2.0);
    std::vector<std::size_t> rp(n), cp(n);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), gen);
    std::shuffle(cp.begin(), cp.end(), gen);
    SquareMatrix shuffled(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) shuffled(i, j) = m(rp[i], cp[j]);
    EXPECT_NEAR(permanent_exact(shuffled).log_magnitude, permanent_exact(m).log_magnitude, 1e-12);
  }
}

TEST(Permanent, WeightMatrixSmallTemperature) {
  // Direct scaling would overflow: 50^(1/0.005) = 50^200.
  const auto w = homogeneous_instance(6, 50.0).with_temperature(0.005);
  EXPECT_NEAR(permanent_exact(w).log_magnitude, homogeneous_log_z(6, 50.0, 0.005), 1e-9 * 4700);
}

TEST(Determinant, Examples) {
  const auto id = determinant(SquareMatrix::identity(3));
  EXPECT_EQ(id.sign, 1);
  EXPECT_NEAR(id.log_magnitude, 0.0, 1e-15);
  const auto d = determinant(SquareMatrix::from_rows({{1, 2}, {3, 4}}));
  EXPECT_EQ(d.sign, -1);
  EXPECT_NEAR(d.log_magnitude, std::log(2.0), 1e-14);
  EXPECT_EQ(determinant(SquareMatrix(3, 1.0)).sign, 0);
}

TEST(Determinant, MatchesCofactorExpansion) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto m = oracle::random_matrix(7 * n, n, -1.0, 1.0);
    const double expected = oracle::determinant(m);
    EXPECT_NEAR(determinant(m).to_double(), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Determinant, Complex) {
  ComplexMatrix m(2);
  m(0, 0) = {1, 1};
  m(0, 1) = {2, 0};
  m(1, 0) = {0, 1};
  m(1, 1) = {3, -1};
  const auto d = determinant(m);
  // (1+i)(3-i) - 2i = 4 + 2i - 2i = 4
  EXPECT_NEAR(d.real(), 4.0, 1e-14);
  EXPECT_NEAR(d.imag(), 0.0, 1e-14);
}

TEST(MlMatching, Examples) {
  const auto h = ml_matching(homogeneous_instance(5, 2.0));
  EXPECT_EQ(h.perm, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(h.unique);

  const auto m = ml_matching(WeightMatrix(SquareMatrix::from_rows({{1, 2}, {3, 4}})));
  EXPECT_EQ(m.perm, (std::vector<std::size_t>{1, 0}));
  EXPECT_NEAR(m.log_weight, std::log(6.0), 1e-14);

  EXPECT_THROW(ml_matching(WeightMatrix(SquareMatrix::from_rows({{0, 1}, {0, 1}}))), InfeasibleError);
}

TEST(MlMatching, TiesAreFlagged) {
  const auto m = ml_matching(WeightMatrix(SquareMatrix(3, 1.0)));
  EXPECT_FALSE(m.unique);
}

TEST(MlMatching, MatchesBruteForce) {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      auto p = oracle::random_matrix(1000 + 10 * n + seed, n, 0.0, 1.0);
      if (n > 2 && seed % 2 == 1) {
        p(0, 0) = 0.0;
        p(n - 1, 1) = 0.0;
      }
      const WeightMatrix w(p, 0.7);
      const auto got = ml_matching(w);
      const auto expected = oracle::max_matching(w.log_scaled());
      EXPECT_NEAR(got.log_weight, expected.log_weight, 1e-12);
      EXPECT_EQ(got.perm, expected.perm);
      EXPECT_EQ(got.unique, expected.ties == 1);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += w.log_scaled(i, got.perm[i]);
      EXPECT_NEAR(s, got.log_weight, 1e-12);
    }
  }
}

TEST(Derangements, Examples) {
  EXPECT_EQ(derangement_numbers(1), (std::vector<double>{1, 0}));
  EXPECT_EQ(derangement_numbers(3), (std::vector<double>{1, 0, 1, 2}));
  EXPECT_EQ(derangement_numbers(4).back(), 9.0);
}

TEST(Derangements, MatchInclusionExclusion) {
  const auto d = derangement_numbers(20);
  for (unsigned k = 0; k <= 20; ++k) EXPECT_EQ(d[k], static_cast<double>(oracle::derangements(k))) << k;
}

TEST(Derangements, LogDomainContinuesPastOverflow) {
  EXPECT_THROW(derangement_numbers(171), CapacityError);
  const auto ld = log_derangement_numbers(400);
  EXPECT_TRUE(std::isinf(ld[1]));
  // D_k ~ k!/e
  for (std::size_t k : {100u, 170u, 171u, 250u, 400u})
    EXPECT_NEAR(ld[k], std::lgamma(k + 1.0) - 1.0, 1e-9 * ld[k]) << k;
}

TEST(Homogeneous, Instance) {
  EXPECT_EQ(homogeneous_instance(2, 3.0).raw(), SquareMatrix::from_rows({{3, 1}, {1, 3}}));
  EXPECT_EQ(homogeneous_instance(2, 3.0).temperature(), 1.0);
  const auto h = homogeneous_instance(10, 2.0);
  EXPECT_EQ(h.n(), 10u);
  EXPECT_EQ(h.raw()(3, 3), 2.0);
  EXPECT_EQ(h.raw()(3, 4), 1.0);
  EXPECT_THROW(homogeneous_instance(2, 0.5), DomainError);
  EXPECT_THROW(homogeneous_instance(1, 2.0), DomainError);
}

TEST(Homogeneous, LogZExamples) {
  EXPECT_NEAR(homogeneous_log_z(4, 2.0, 1.0), std::log(65.0), 1e-14);
  EXPECT_NEAR(homogeneous_log_z(2, 2.0, 1.0), std::log(5.0), 1e-14);
  EXPECT_NEAR(homogeneous_log_z(10, 2.0, kInfiniteTemperature), std::lgamma(11.0), 1e-12);
  EXPECT_NEAR(homogeneous_log_z(10, 2.0, 1e6), std::lgamma(11.0), 1e-5);
}

TEST(Homogeneous, LogZMatchesPermanent) {
  for (std::size_t n = 1; n <= 10; ++n) {
    for (double big_w : {2.0, 5.0}) {
      for (double t : {0.5, 1.0, 2.0}) {
        SquareMatrix p(n, 1.0);
        for (std::size_t i = 0; i < n; ++i) p(i, i) = big_w;
        const double exact = permanent_exact(WeightMatrix(p, t)).log_magnitude;
        EXPECT_NEAR(homogeneous_log_z(n, big_w, t), exact, 1e-9 * std::max(1.0, std::abs(exact)))
            << n << " " << big_w << " " << t;
      }
    }
  }
}

TEST(LogValue, RoundTrip) {
  for (double x : {1e-300, -3.5e-7, 0.1, -1.0, 42.0, 1e200}) {
    const auto v = LogValue::from_double(x);
    EXPECT_NEAR(v.to_double(), x, 1e-12 * std::abs(x));
  }
  const auto z = LogValue::from_double(0.0);
  EXPECT_EQ(z.sign, 0);
  EXPECT_TRUE(std::isinf(z.log_magnitude));
  EXPECT_EQ((LogValue::from_double(-2.0) * LogValue::from_double(3.0)).to_double(), -6.0);
  EXPECT_NEAR((LogValue::from_double(-2.0) / LogValue::from_double(-4.0)).to_double(), 0.5, 1e-15);
  EXPECT_EQ((z * LogValue::from_double(3.0)).sign, 0);
}

TEST(LogSumExp, Stable) {
  const std::vector<double> xs{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(xs), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> none{-INFINITY, -INFINITY};
  EXPECT_TRUE(std::isinf(log_sum_exp(none)));
}

}  // namespace
}  // namespace bpperm
