#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qspike/error.hpp"
#include "qspike/noise.hpp"

using namespace qspike;
using namespace qspike::noise;

namespace {

Image ramp() {
  Image img{};
  for (int i = 0; i < kPixels; ++i) img[i] = static_cast<double>(i % 29) / 28.0;
  return img;
}

double mean(const Image& img) {
  double s = 0;
  for (double v : img) s += v;
  return s / kPixels;
}

}  // namespace

TEST(NoiseSpec, ParsesAndPrints) {
  EXPECT_EQ(to_string(parse_noise_spec("salt_pepper:p=0.3")), "salt_pepper:p=0.3");
  EXPECT_EQ(to_string(parse_noise_spec("gaussian:sigma=0.3")), "gaussian:sigma=0.3");
  EXPECT_EQ(to_string(parse_noise_spec("rayleigh:scale=0.05")), "rayleigh:scale=0.05");
  EXPECT_EQ(to_string(parse_noise_spec("uniform:low=0,high=0.3")), "uniform:low=0,high=0.3");
  EXPECT_EQ(to_string(parse_noise_spec("perlin:res=14")), "perlin:res=14");
  EXPECT_EQ(to_string(parse_noise_spec("none")), "none");
  for (const char* text : {"salt_pepper:p=0.02", "gaussian:sigma=0.9", "uniform:low=0.1,high=0.2", "perlin:res=7"}) {
    EXPECT_EQ(to_string(parse_noise_spec(to_string(parse_noise_spec(text)))), to_string(parse_noise_spec(text)));
  }
}

TEST(NoiseSpec, RejectsBadSpecs) {
  for (const char* text : {"bogus:x=1", "gaussian", "gaussian:sigma=-1", "salt_pepper:p=1.5", "perlin:res=0",
                           "perlin:res=29", "perlin:res=2.5", "uniform:low=0.5,high=0.1", "gaussian:sigma=abc",
                           "gaussian:sigma=0.1,extra=2", "gaussian:sigma"}) {
    EXPECT_THROW(parse_noise_spec(text), ArgumentError) << text;
  }
}

TEST(NoiseSpec, IntensityAndSweepParameter) {
  EXPECT_EQ(intensity(parse_noise_spec("gaussian:sigma=0.3")), 0.3);
  EXPECT_EQ(intensity(parse_noise_spec("uniform:low=0,high=0.4")), 0.4);
  EXPECT_EQ(intensity(parse_noise_spec("none")), 0.0);
  const auto s = with_parameter(parse_noise_spec("salt_pepper:p=0.1"), "p", 0.6);
  EXPECT_EQ(to_string(s), "salt_pepper:p=0.6");
  EXPECT_THROW(with_parameter(s, "sigma", 0.1), ArgumentError);
  EXPECT_THROW(with_parameter(s, "p", 2.0), ArgumentError);
  EXPECT_EQ(kind_name(s), "salt_pepper");
}

TEST(Corrupt, IdentityLimitsAreExact) {
  const Image img = ramp();
  Rng rng(1);
  for (const char* text : {"none", "salt_pepper:p=0", "gaussian:sigma=0", "rayleigh:scale=0", "uniform:low=0,high=0"}) {
    EXPECT_EQ(corrupt(img, parse_noise_spec(text), rng), img) << text;
  }
}

TEST(Corrupt, OutputsStayInUnitInterval) {
  const Image img = ramp();
  Rng rng(2);
  for (const char* text : {"salt_pepper:p=0.5", "gaussian:sigma=0.9", "rayleigh:scale=0.9", "uniform:low=0,high=0.9",
                           "uniform:low=-0.5,high=0.5", "perlin:res=1", "perlin:res=7", "perlin:res=14"}) {
    const Image out = corrupt(img, parse_noise_spec(text), rng);
    for (double v : out) {
      ASSERT_GE(v, 0.0) << text;
      ASSERT_LE(v, 1.0) << text;
    }
  }
}

TEST(Corrupt, SaltPepperFraction) {
  Image mid;
  mid.fill(0.5);
  Rng rng(3);
  const double p = 0.3;
  std::size_t changed = 0, salt = 0, total = 0;
  while (total < 100000) {
    const Image out = corrupt(mid, SaltPepper{p}, rng);
    for (double v : out) {
      changed += v != 0.5;
      salt += v == 1.0;
      ++total;
    }
  }
  const double n = static_cast<double>(total);
  EXPECT_LE(std::abs(static_cast<double>(changed) - n * p), 4 * std::sqrt(n * p * (1 - p)));
  EXPECT_LE(std::abs(static_cast<double>(salt) - n * p / 2), 4 * std::sqrt(n * p / 2 * (1 - p / 2)));
}

TEST(Corrupt, SaltPepperFullProbabilityIsBinary) {
  Rng rng(4);
  for (double v : corrupt(ramp(), SaltPepper{1.0}, rng)) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(Corrupt, AdditiveNoiseMoments) {
  // On a mid-grey image with small noise clamping never triggers.
  Image mid;
  mid.fill(0.5);
  Rng rng(5);
  double s = 0, s2 = 0, n = 0;
  for (int i = 0; i < 50; ++i) {
    for (double v : corrupt(mid, Gaussian{0.05}, rng)) {
      s += v - 0.5;
      s2 += (v - 0.5) * (v - 0.5);
      ++n;
    }
  }
  EXPECT_NEAR(s / n, 0.0, 0.002);
  EXPECT_NEAR(std::sqrt(s2 / n), 0.05, 0.002);

  s = 0, n = 0;
  for (int i = 0; i < 50; ++i) {
    for (double v : corrupt(mid, Rayleigh{0.1}, rng)) {
      s += v - 0.5;
      ++n;
    }
  }
  EXPECT_NEAR(s / n, 0.1 * std::sqrt(std::numbers::pi / 2), 0.003);

  Image zero{};
  const Image u = corrupt(zero, Uniform{0.2, 0.4}, rng);
  for (double v : u) {
    EXPECT_GE(v, 0.2);
    EXPECT_LE(v, 0.4);
  }
  EXPECT_NEAR(mean(u), 0.3, 0.01);
}

TEST(Perlin, ZeroAtLatticeCorners) {
  for (int res : {1, 2, 4, 7, 14, 28}) {
    Rng rng(static_cast<std::uint64_t>(res));
    const Image f = perlin_field(res, rng);
    for (int row = 0; row < kSide; ++row) {
      for (int col = 0; col < kSide; ++col) {
        if ((row * res) % kSide == 0 && (col * res) % kSide == 0) {
          EXPECT_EQ(f[row * kSide + col], 0.0) << "res " << res << " at " << row << "," << col;
        }
      }
    }
  }
}

TEST(Perlin, BoundedAndNotTrivial) {
  Rng rng(6);
  const Image f = perlin_field(7, rng);
  double peak = 0;
  for (double v : f) {
    EXPECT_LE(std::abs(v), std::sqrt(2.0) / 2 + 1e-12);
    peak = std::max(peak, std::abs(v));
  }
  EXPECT_GT(peak, 0.05);
  EXPECT_THROW(perlin_field(0, rng), ArgumentError);
}

TEST(Corrupt, DeterministicGivenSeed) {
  const auto spec = parse_noise_spec("gaussian:sigma=0.3");
  Rng a(11), b(11);
  EXPECT_EQ(corrupt(ramp(), spec, a), corrupt(ramp(), spec, b));
}

TEST(Corrupt, CorruptAllRequiresWholeImages) {
  std::vector<double> px(kPixels + 3, 0.0);
  Rng rng(1);
  EXPECT_THROW(corrupt_all(px, Gaussian{0.1}, rng), ShapeError);
  std::vector<double> two(2 * kPixels, 0.5);
  corrupt_all(two, SaltPepper{1.0}, rng);
  for (double v : two) EXPECT_TRUE(v == 0.0 || v == 1.0);
}
