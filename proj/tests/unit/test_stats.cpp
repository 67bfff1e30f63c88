#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gen.hpp"
#include "radsum/error.hpp"
#include "radsum/stats.hpp"

using namespace radsum;

namespace {

std::vector<std::string> ids_for(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
  return ids;
}

// Independent type-7 quantile: nth_element on a copy, no shared helper.
double quantile7(std::vector<double> v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(h);
  std::nth_element(v.begin(), v.begin() + static_cast<long>(lo), v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + static_cast<long>(lo) + 1, v.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

}  // namespace

TEST(LengthStats, FiveValues) {
  const std::vector<std::size_t> lengths{1, 2, 3, 4, 5};
  auto s = length_stats(lengths, ids_for(5));
  EXPECT_DOUBLE_EQ(s.median, 3.0);
  EXPECT_DOUBLE_EQ(s.q1, 2.0);
  EXPECT_DOUBLE_EQ(s.q3, 4.0);
  EXPECT_DOUBLE_EQ(s.iqr, 2.0);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.whisker_lo, 1.0);
  EXPECT_DOUBLE_EQ(s.whisker_hi, 5.0);
  EXPECT_TRUE(s.outlier_ids.empty());
}

TEST(LengthStats, Singleton) {
  const std::vector<std::size_t> lengths{7};
  auto s = length_stats(lengths, ids_for(1));
  EXPECT_EQ(s.n, 1u);
  EXPECT_DOUBLE_EQ(s.median, 7.0);
  EXPECT_DOUBLE_EQ(s.q1, 7.0);
  EXPECT_DOUBLE_EQ(s.q3, 7.0);
  EXPECT_TRUE(s.outlier_ids.empty());
}

TEST(LengthStats, InterpolatedQuartilesAndOutliers) {
  const std::vector<std::size_t> lengths{1, 2, 3, 4, 100, 3};
  const std::vector<std::string> ids{"a", "b", "c", "d", "e", "f"};
  auto s = length_stats(lengths, ids);
  // sorted 1 2 3 3 4 100: q1 at 1.25 -> 2.25, median 3, q3 at 3.75 -> 3.75
  EXPECT_DOUBLE_EQ(s.q1, 2.25);
  EXPECT_DOUBLE_EQ(s.median, 3.0);
  EXPECT_DOUBLE_EQ(s.q3, 3.75);
  EXPECT_DOUBLE_EQ(s.whisker_hi, 4.0);
  EXPECT_DOUBLE_EQ(s.whisker_lo, 1.0);
  EXPECT_EQ(s.outlier_ids, std::vector<std::string>{"e"});
}

TEST(LengthStats, Errors) {
  const std::vector<std::size_t> none;
  try {
    length_stats(none, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
  const std::vector<std::size_t> two{1, 2};
  EXPECT_THROW(length_stats(two, ids_for(1)), Error);
}

TEST(LengthStatsProperty, PermutationInvariantAndInvariantsHold) {
  testgen::Rng rng(303);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = testgen::uniform(rng, 1, 60);
    std::vector<std::size_t> lengths(n);
    for (auto& l : lengths) l = testgen::uniform(rng, 0, 5) == 0 ? testgen::uniform(rng, 0, 300) : testgen::uniform(rng, 3, 40);
    auto ids = ids_for(n);
    auto base = length_stats(lengths, ids);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> pl;
    std::vector<std::string> pi;
    for (auto k : order) {
      pl.push_back(lengths[k]);
      pi.push_back(ids[k]);
    }
    ASSERT_EQ(length_stats(pl, pi), base);

    ASSERT_LE(base.q1, base.median);
    ASSERT_LE(base.median, base.q3);
    ASSERT_DOUBLE_EQ(base.iqr, base.q3 - base.q1);
    std::size_t outside = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(lengths[i]);
      if (v < base.whisker_lo || v > base.whisker_hi) ++outside;
      if (v >= base.q1 - 1.5 * base.iqr) ASSERT_LE(base.whisker_lo, v);
      if (v <= base.q3 + 1.5 * base.iqr) ASSERT_GE(base.whisker_hi, v);
    }
    ASSERT_EQ(outside, base.outlier_ids.size());
  }
}

TEST(Silverman, ConstantDataIsDegenerate) {
  const std::vector<double> v{5, 5, 5};
  try {
    silverman_bandwidth(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Degenerate);
  }
  const std::vector<double> one{1};
  EXPECT_THROW(silverman_bandwidth(one), Error);
}

TEST(Silverman, StandardNormalSampleMatchesFormula) {
  testgen::Rng rng(404);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(1000);
  for (auto& x : v) x = normal(rng);

  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= 1000.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / 999.0);
  const double iqr = quantile7(v, 0.75) - quantile7(v, 0.25);
  const double expected = 0.9 * std::min(sd, iqr / 1.34) * std::pow(1000.0, -0.2);
  EXPECT_NEAR(silverman_bandwidth(v), expected, 1e-12);
  EXPECT_NEAR(silverman_bandwidth(v), 0.9 * std::pow(1000.0, -0.2), 0.05);
}

TEST(Silverman, ZeroIqrFallsBackToSd) {
  const std::vector<double> v{1, 1, 1, 1, 1, 1, 1, 9};
  const double sd = sample_sd(v);
  EXPECT_NEAR(silverman_bandwidth(v), 0.9 * sd * std::pow(8.0, -0.2), 1e-12);
}

TEST(Kde, SinglePoint) {
  const std::vector<double> v{0.0};
  EXPECT_NEAR(kde_at(v, 1.0, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  auto curve = kde(v, 1.0, 513);
  EXPECT_NEAR(curve.density[256], 0.3989422804, 1e-9);
  EXPECT_DOUBLE_EQ(curve.grid.front(), -3.0);
  EXPECT_DOUBLE_EQ(curve.grid.back(), 3.0);
}

TEST(Kde, SymmetricData) {
  const std::vector<double> v{-1.0, 1.0};
  auto curve = kde(v, 0.7, 401);
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    EXPECT_NEAR(curve.density[i], curve.density[curve.grid.size() - 1 - i], 1e-12);
    EXPECT_NEAR(kde_at(v, 0.7, curve.grid[i]), kde_at(v, 0.7, -curve.grid[i]), 1e-12);
  }
}

TEST(Kde, InvalidBandwidth) {
  const std::vector<double> v{1.0, 2.0};
  EXPECT_THROW(kde(v, 0.0, 16), Error);
  EXPECT_THROW(kde(v, -1.0, 16), Error);
  EXPECT_THROW(kde(v, std::nan(""), 16), Error);
}

TEST(KdeProperty, IntegralNearOneOverPaddedGrid) {
  testgen::Rng rng(505);
  for (std::size_t n : {10u, 100u, 1000u}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(n);
      for (auto& x : v) x = trial % 2 ? testgen::real(rng, 0.0, 50.0) : std::round(testgen::real(rng, 1.0, 80.0));
      const double h = silverman_bandwidth(v);
      auto curve = kde(v, h);
      ASSERT_EQ(curve.grid.size(), 512u);
      for (double d : curve.density) ASSERT_GE(d, 0.0);
      const double area = trapezoid(curve.grid, curve.density);
      ASSERT_GE(area, 0.98) << "n=" << n;
      ASSERT_LE(area, 1.02) << "n=" << n;
    }
  }
}
