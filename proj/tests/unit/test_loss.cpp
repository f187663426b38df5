#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qspike/error.hpp"
#include "qspike/loss.hpp"

using namespace qspike;

TEST(CrossEntropy, UniformFourClass) {
  const std::vector<double> z(4, 0.25);
  const double expected = -(std::log(0.25) + 3 * std::log(0.75));
  for (int t = 0; t < 4; ++t) {
    EXPECT_NEAR(train::cross_entropy(z, t), expected, 1e-12);
    EXPECT_NEAR(train::cross_entropy(z, t), 2.2493, 1e-4);
  }
}

TEST(CrossEntropy, MatchesDirectEvaluation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> z(5);
    double s = 0;
    for (auto& x : z) s += (x = u(rng));
    for (auto& x : z) x /= s;
    EXPECT_NEAR(train::cross_entropy(z, i % 5), oracle::bce(z, i % 5), 1e-12);
  }
}

TEST(CrossEntropy, PerfectPredictionIsNearZeroAndClamped) {
  const std::vector<double> z{0.0, 1.0, 0.0};
  const double l = train::cross_entropy(z, 1);
  EXPECT_GE(l, 0.0);
  EXPECT_LT(l, 1e-6);
  const std::vector<double> wrong{1.0, 0.0, 0.0};
  EXPECT_TRUE(std::isfinite(train::cross_entropy(wrong, 1)));
  EXPECT_NEAR(train::cross_entropy(wrong, 1), -2 * std::log(1e-7) - std::log(1 - 1e-7), 1e-9);
}

TEST(CrossEntropy, GradientMatchesFiniteDifference) {
  const std::vector<double> z{0.1, 0.5, 0.3, 0.1};
  const auto g = train::cross_entropy_grad(z, 2);
  for (std::size_t j = 0; j < z.size(); ++j) {
    auto f = [](std::span<const double> v) { return oracle::bce(v, 2); };
    EXPECT_NEAR(g[j], oracle::central_diff(f, z, j, 1e-7), 1e-5);
  }
}

TEST(CrossEntropy, GradientZeroOutsideClampBand) {
  const std::vector<double> z{0.0, 1.0, 0.0};
  for (double g : train::cross_entropy_grad(z, 1)) EXPECT_EQ(g, 0.0);
}

TEST(CrossEntropy, RejectsBadTargets) {
  const std::vector<double> z{0.5, 0.5};
  EXPECT_THROW(train::cross_entropy(z, 2), ArgumentError);
  EXPECT_THROW(train::cross_entropy(z, -1), ArgumentError);
  EXPECT_THROW(train::cross_entropy(std::vector<double>{}, 0), ArgumentError);
}
