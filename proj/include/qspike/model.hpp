#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qspike/vqc.hpp"

namespace qspike::model {

using Rng = std::mt19937_64;

/// Fully connected layer y = W x + b, W stored row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  static DenseLayer zeros(std::size_t out, std::size_t in);
  /// U(-1/sqrt(in), 1/sqrt(in)) for weights and bias.
  static DenseLayer uniform_init(std::size_t out, std::size_t in, Rng& rng);

  std::vector<double> apply(std::span<const double> x) const;
  double& w(std::size_t o, std::size_t i) { return weights[o * in + i]; }
  double w(std::size_t o, std::size_t i) const { return weights[o * in + i]; }
};

enum class HeadKind { quantum, classical };
enum class Mode { stochastic, expected };

HeadKind parse_head(std::string_view text);
Mode parse_mode(std::string_view text);
std::string_view to_string(HeadKind h);
std::string_view to_string(Mode m);

struct ModelConfig {
  std::size_t input = 784;
  std::size_t hidden = 128;
  std::size_t features = 10;
  int n_qubits = 6;
  int n_layers = 2;
  int n_classes = 4;
  HeadKind head = HeadKind::quantum;
  std::size_t spike_steps = 16;
  double dt = 1.0;
  /// Standard deviation of the initial variational angles.
  double vqc_init_scale = 0.1;
};

/// All trainable tensors. Also used, zero-initialised, to hold gradients.
///
/// `mixer` is the n_qubits x n_qubits tanh layer that stands in for the
/// circuit in the classical-head variant; it is empty for the quantum head.
struct RqnnParams {
  DenseLayer l1;
  DenseLayer l2;
  DenseLayer pre_input;
  vqc::VqcParams vqc;
  DenseLayer mixer;
  DenseLayer head;

  static RqnnParams zeros(const ModelConfig& cfg);

  /// Visits every non-empty tensor as (name, shape, values), in a fixed order.
  void for_each(const std::function<void(std::string_view, std::vector<std::size_t>, std::span<double>)>& fn);
  void for_each(
      const std::function<void(std::string_view, std::vector<std::size_t>, std::span<const double>)>& fn) const;
  std::size_t count() const;
};

using ModelGradients = RqnnParams;

struct RqnnModel {
  ModelConfig config;
  RqnnParams params;
  /// Bumped whenever parameters are modified through the training API; a
  /// forward cache is only valid for the revision that produced it.
  std::uint64_t revision = 0;

  static RqnnModel create(const ModelConfig& cfg, Rng& rng);
  static RqnnModel zeros(const ModelConfig& cfg);
};

/// Throws ShapeError when the tensors do not chain.
void validate(const RqnnModel& model);

/// Intermediates kept for the backward pass.
struct ForwardCache {
  std::uint64_t revision = 0;
  bool valid = false;
  std::vector<double> input;
  std::vector<double> potentials;  // l1 output
  std::vector<double> rates;       // pooled spikes or expected rate
  std::vector<double> features;    // l2 output
  std::vector<double> pre;         // pre_input output
  std::vector<double> omega;       // encoding angles
  std::vector<double> quantum;     // circuit readout or mixer output
  std::vector<double> logits;
  std::vector<double> probs;
};

struct ForwardResult {
  std::vector<double> probs;
  ForwardCache cache;
};

/// image -> l1 -> spiking ReLU + pooling (or its expectation) -> l2 ->
/// pre_input -> (pi/2) tanh -> circuit or mixer -> head -> softmax.
ForwardResult forward(const RqnnModel& model, std::span<const double> image, Rng& rng, Mode mode);

/// Gradient of cross-entropy(probs, target) with respect to every tensor.
ModelGradients backward(const RqnnModel& model, const ForwardCache& cache, int target);

/// argmax of the expected-mode probabilities, smallest index on ties.
int predict(const RqnnModel& model, std::span<const double> image);

/// Expected-mode forward of a classical-head model.
std::vector<double> classical_head_forward(const RqnnModel& model, std::span<const double> image);

/// Index of the largest entry, smallest index on ties.
int argmax(std::span<const double> values);

std::vector<double> softmax(std::span<const double> logits);

/// Predictions for a row-major stack of images, computed in parallel.
std::vector<int> predict_batch(const RqnnModel& model, std::span<const double> images);

}  // namespace qspike::model
