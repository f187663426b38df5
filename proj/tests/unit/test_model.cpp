#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "gradcheck.hpp"
#include "qspike/error.hpp"
#include "qspike/model.hpp"

using namespace qspike;
using namespace qspike::model;

namespace {

ModelConfig toy_config(HeadKind head = HeadKind::quantum) {
  ModelConfig c;
  c.input = 4;
  c.hidden = 3;
  c.features = 3;
  c.n_qubits = 2;
  c.n_layers = 2;
  c.n_classes = 2;
  c.head = head;
  c.vqc_init_scale = 1.0;
  return c;
}

std::vector<double> random_image(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> img(n);
  for (auto& v : img) v = u(rng);
  return img;
}

}  // namespace

TEST(Dense, ApplyIsAffine) {
  auto d = DenseLayer::zeros(2, 3);
  d.weights = {1, 2, 3, -1, 0, 1};
  d.bias = {0.5, -0.5};
  EXPECT_EQ(d.apply(std::vector<double>{1, 1, 1}), (std::vector<double>{6.5, -0.5}));
  EXPECT_THROW(d.apply(std::vector<double>{1, 1}), ShapeError);
}

TEST(Dense, UniformInitBounds) {
  Rng rng(1);
  const auto d = DenseLayer::uniform_init(16, 25, rng);
  for (double w : d.weights) EXPECT_LE(std::abs(w), 0.2);
  for (double b : d.bias) EXPECT_LE(std::abs(b), 0.2);
}

TEST(Model, DefaultShapesAndNames) {
  Rng rng(1);
  const auto m = RqnnModel::create(ModelConfig{}, rng);
  EXPECT_NO_THROW(validate(m));
  std::vector<std::string> names;
  m.params.for_each([&](std::string_view n, std::vector<std::size_t>, std::span<const double>) { names.emplace_back(n); });
  EXPECT_EQ(names, (std::vector<std::string>{"l1.weight", "l1.bias", "l2.weight", "l2.bias", "pre_input.weight",
                                             "pre_input.bias", "vqc.theta", "head.weight", "head.bias"}));
  EXPECT_EQ(m.params.count(), 784u * 128 + 128 + 128 * 10 + 10 + 10 * 6 + 6 + 24 + 6 * 4 + 4);

  const auto c = RqnnModel::create([] {
    ModelConfig cfg;
    cfg.head = HeadKind::classical;
    return cfg;
  }(), rng);
  std::set<std::string> cn;
  c.params.for_each([&](std::string_view n, std::vector<std::size_t>, std::span<const double>) { cn.emplace(n); });
  EXPECT_TRUE(cn.contains("mixer.weight"));
  EXPECT_FALSE(cn.contains("vqc.theta"));
}

TEST(Model, RejectsBadConfigs) {
  ModelConfig c;
  c.n_qubits = 13;
  EXPECT_THROW(RqnnModel::zeros(c), ArgumentError);
  c = {};
  c.hidden = 0;
  EXPECT_THROW(RqnnModel::zeros(c), ArgumentError);
  EXPECT_THROW(parse_head("hybrid"), ArgumentError);
  EXPECT_THROW(parse_mode("mean"), ArgumentError);
  EXPECT_EQ(parse_head("classical"), HeadKind::classical);
  EXPECT_EQ(parse_mode("expected"), Mode::expected);
}

TEST(Model, ValidateCatchesShapeDrift) {
  Rng rng(2);
  auto m = RqnnModel::create(toy_config(), rng);
  m.params.l2.weights.pop_back();
  EXPECT_THROW(validate(m), ShapeError);
}

TEST(Model, ProbabilitiesFormDistribution) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    ModelConfig cfg = toy_config(i % 2 ? HeadKind::classical : HeadKind::quantum);
    cfg.input = 16;
    cfg.n_classes = 4;
    const auto m = RqnnModel::create(cfg, rng);
    const auto img = random_image(16, rng);
    for (Mode mode : {Mode::expected, Mode::stochastic}) {
      const auto probs = forward(m, img, rng, mode).probs;
      ASSERT_EQ(probs.size(), 4u);
      double s = 0;
      for (double p : probs) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        s += p;
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(Model, ForwardRejectsWrongImageSize) {
  Rng rng(4);
  const auto m = RqnnModel::create(toy_config(), rng);
  EXPECT_THROW(forward(m, std::vector<double>(5, 0.0), rng, Mode::expected), ShapeError);
}

TEST(Model, ExpectedModeIsDeterministic) {
  Rng rng(5);
  const auto m = RqnnModel::create(toy_config(), rng);
  const auto img = random_image(4, rng);
  Rng a(1), b(999);
  EXPECT_EQ(forward(m, img, a, Mode::expected).probs, forward(m, img, b, Mode::expected).probs);
}

TEST(Model, StochasticModeAveragesToExpectedRates) {
  Rng rng(6);
  auto cfg = toy_config();
  cfg.spike_steps = 20000;
  const auto m = RqnnModel::create(cfg, rng);
  const auto img = random_image(4, rng);
  const auto exp = forward(m, img, rng, Mode::expected).cache;
  const auto sto = forward(m, img, rng, Mode::stochastic).cache;
  for (std::size_t i = 0; i < exp.rates.size(); ++i) EXPECT_NEAR(sto.rates[i], exp.rates[i], 0.015);
}

TEST(Model, GradientMatchesFiniteDifferenceQuantum) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto m = RqnnModel::create(toy_config(), rng);
    const auto img = random_image(4, rng);
    const auto worst = gradcheck::compare(m, img, static_cast<int>(seed % 2));
    EXPECT_LE(worst.rel, 1e-3) << "seed " << seed << " " << worst.tensor << "[" << worst.index << "]";
  }
}

TEST(Model, GradientMatchesFiniteDifferenceClassical) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    auto m = RqnnModel::create(toy_config(HeadKind::classical), rng);
    const auto img = random_image(4, rng);
    const auto worst = gradcheck::compare(m, img, static_cast<int>(seed % 2));
    EXPECT_LE(worst.rel, 1e-3) << "seed " << seed << " " << worst.tensor << "[" << worst.index << "]";
  }
}

TEST(Model, StaleCacheIsRejected) {
  Rng rng(7);
  auto m = RqnnModel::create(toy_config(), rng);
  const auto img = random_image(4, rng);
  auto fwd = forward(m, img, rng, Mode::expected);
  EXPECT_NO_THROW(backward(m, fwd.cache, 0));
  m.revision += 1;
  EXPECT_THROW(backward(m, fwd.cache, 0), StateError);
  EXPECT_THROW(backward(m, ForwardCache{}, 0), StateError);
}

TEST(Model, ArgmaxPrefersFirstOnTies) {
  EXPECT_EQ(argmax(std::vector<double>{0.2, 0.4, 0.4}), 1);
  EXPECT_EQ(argmax(std::vector<double>{1.0}), 0);
  EXPECT_THROW(argmax(std::vector<double>{}), ArgumentError);
}

TEST(Model, SoftmaxIsShiftInvariantAndStable) {
  const auto a = softmax(std::vector<double>{1, 2, 3});
  const auto b = softmax(std::vector<double>{1001, 1002, 1003});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
  EXPECT_NEAR(a[2], std::exp(3.0) / (std::exp(1.0) + std::exp(2.0) + std::exp(3.0)), 1e-15);
}

TEST(Model, BatchPredictionMatchesSingle) {
  Rng rng(8);
  auto cfg = toy_config();
  cfg.n_classes = 3;
  const auto m = RqnnModel::create(cfg, rng);
  const auto images = random_image(4 * 37, rng);
  const auto batch = predict_batch(m, images);
  ASSERT_EQ(batch.size(), 37u);
  for (std::size_t i = 0; i < 37; ++i) EXPECT_EQ(batch[i], predict(m, std::span(images).subspan(4 * i, 4)));
  EXPECT_THROW(predict_batch(m, std::vector<double>(7, 0.0)), ShapeError);
}

TEST(Model, ClassicalHeadForwardAgreesWithForward) {
  Rng rng(9);
  const auto m = RqnnModel::create(toy_config(HeadKind::classical), rng);
  const auto img = random_image(4, rng);
  EXPECT_EQ(classical_head_forward(m, img), forward(m, img, rng, Mode::expected).probs);
  const auto q = RqnnModel::create(toy_config(), rng);
  EXPECT_THROW(classical_head_forward(q, img), ArgumentError);
}
