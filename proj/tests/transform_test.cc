#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "srgc/error.h"
#include "srgc/spectral.h"
#include "srgc/transform.h"
#include "test_util.h"

namespace srgc {
namespace {

double Norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Textbook orthonormal DCT-II, O(n^2).
std::vector<double> NaiveDct(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<double> out(n);
  for (size_t k = 0; k < n; ++k) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) {
      s += x[i] * std::cos(std::numbers::pi * (2.0 * i + 1) * k / (2.0 * n));
    }
    out[k] = s * std::sqrt((k == 0 ? 1.0 : 2.0) / n);
  }
  return out;
}

EigenBasis ConnectedBasis(std::mt19937& rng, int n) {
  return Eigendecompose(BuildLaplacian(testing::RandomConnectedGraph(rng, n, 0.2)));
}

TEST(GftTest, ConstantSignalIsDcOnly) {
  std::mt19937 rng(1);
  const int n = 16;
  const EigenBasis b = ConnectedBasis(rng, n);
  const auto c = Gft(b, std::vector<double>(n, 5.0));
  EXPECT_NEAR(c[0], 5.0 * std::sqrt(double(n)), 1e-9);
  for (int k = 1; k < n; ++k) EXPECT_NEAR(c[k], 0, 1e-9);
  for (double x : Gft(b, std::vector<double>(n, 0.0))) EXPECT_EQ(x, 0.0);
}

TEST(GftTest, ParsevalAndRoundTrip) {
  std::mt19937 rng(2);
  const EigenBasis b = ConnectedBasis(rng, 16);
  const auto f = testing::RandomVector(rng, 16, -100, 100);
  const auto c = Gft(b, f);
  EXPECT_NEAR(Norm(c), Norm(f), 1e-9);
  const auto back = Igft(b, c);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(back[i], f[i], 1e-9);
}

TEST(GftTest, UnitDcIsConstant) {
  std::mt19937 rng(3);
  const EigenBasis b = ConnectedBasis(rng, 9);
  std::vector<double> e0(9, 0.0);
  e0[0] = 1;
  for (double x : Igft(b, e0)) EXPECT_NEAR(x, 1 / 3.0, 1e-12);
}

TEST(GftTest, CrossBasisPredictionDiffers) {
  std::mt19937 rng(4);
  const EigenBasis a = ConnectedBasis(rng, 10);
  const EigenBasis b = ConnectedBasis(rng, 10);
  const auto f = testing::RandomVector(rng, 10, 0, 255);
  const auto same = Igft(b, Gft(b, f));
  const auto cross = Igft(a, Gft(b, f));
  double same_err = 0, cross_err = 0;
  for (int i = 0; i < 10; ++i) {
    same_err = std::max(same_err, std::abs(same[i] - f[i]));
    cross_err = std::max(cross_err, std::abs(cross[i] - f[i]));
  }
  EXPECT_LT(same_err, 1e-9);
  EXPECT_GT(cross_err, 1e-3);
}

TEST(GftTest, DimensionMismatch) {
  std::mt19937 rng(5);
  const EigenBasis b = ConnectedBasis(rng, 4);
  EXPECT_THROW(Gft(b, {1, 2, 3}), Error);
  EXPECT_THROW(Igft(b, {1, 2, 3, 4, 5}), Error);
}

TEST(DctTest, Examples) {
  const auto c = Dct1d({1, 1, 1, 1});
  EXPECT_NEAR(c[0], 2, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(c[k], 0, 1e-12);
  EXPECT_NEAR(Dct1d({7.5})[0], 7.5, 1e-12);
  EXPECT_NEAR(Idct1d({7.5})[0], 7.5, 1e-12);
}

TEST(DctTest, MatchesNaiveSum) {
  std::mt19937 rng(6);
  for (int n : {2, 3, 8, 17, 64}) {
    const auto x = testing::RandomVector(rng, n, -50, 50);
    const auto fast = Dct1d(x);
    const auto slow = NaiveDct(x);
    for (int k = 0; k < n; ++k) EXPECT_NEAR(fast[k], slow[k], 1e-9);
    EXPECT_NEAR(Norm(fast), Norm(x), 1e-9);
    const auto back = Idct1d(fast);
    for (int k = 0; k < n; ++k) EXPECT_NEAR(back[k], x[k], 1e-9);
  }
}

TEST(QuantizeTest, Examples) {
  const QuantizedVector q = Quantize({7.6, -1.0, 1.0, 0.49}, 2.0);
  EXPECT_EQ(q.levels, (std::vector<int64_t>{4, -1, 1, 0}));
  const auto d = Dequantize(q);
  EXPECT_EQ(d[0], 8.0);
  EXPECT_EQ(d[1], -2.0);
  EXPECT_THROW(Quantize({1.0}, 0.0), Error);
}

TEST(QuantizeTest, ErrorBound) {
  std::mt19937 rng(7);
  for (double q : {0.5, 1.0, 3.0, 16.0}) {
    const auto x = testing::RandomVector(rng, 2000, -1000, 1000);
    const auto d = Dequantize(Quantize(x, q));
    for (size_t i = 0; i < x.size(); ++i) EXPECT_LE(std::abs(d[i] - x[i]), q / 2 + 1e-12);
  }
}

TEST(RoundTest, HalfAway) {
  EXPECT_EQ(RoundHalfAway(2.5), 3);
  EXPECT_EQ(RoundHalfAway(-2.5), -3);
  EXPECT_EQ(RoundHalfAway(-0.4), 0);
}

}  // namespace
}  // namespace srgc
