#include "qspike/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qspike/error.hpp"
#include "qspike/loss.hpp"
#include "qspike/parallel.hpp"
#include "qspike/rnn.hpp"

namespace qspike::model {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// out += W^T v
void add_transpose_product(const DenseLayer& layer, std::span<const double> v, std::span<double> out) {
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double g = v[o];
    if (g == 0.0) continue;
    const double* row = layer.weights.data() + o * layer.in;
    for (std::size_t i = 0; i < layer.in; ++i) out[i] += row[i] * g;
  }
}

std::vector<double> transpose_product(const DenseLayer& layer, std::span<const double> v) {
  std::vector<double> out(layer.in, 0.0);
  add_transpose_product(layer, v, out);
  return out;
}

// grad.W += g x^T, grad.b += g
void accumulate_outer(DenseLayer& grad, std::span<const double> g, std::span<const double> x) {
  for (std::size_t o = 0; o < grad.out; ++o) {
    const double go = g[o];
    grad.bias[o] += go;
    if (go == 0.0) continue;
    double* row = grad.weights.data() + o * grad.in;
    for (std::size_t i = 0; i < grad.in; ++i) row[i] += go * x[i];
  }
}

void check_layer(const DenseLayer& l, std::size_t out, std::size_t in, const char* name) {
  if (l.in != in || l.out != out || l.weights.size() != in * out || l.bias.size() != out) {
    throw ShapeError(std::string(name) + " should be " + std::to_string(out) + "x" + std::to_string(in));
  }
}

void visit_layer(const char* w, const char* b, DenseLayer& l,
                 const std::function<void(std::string_view, std::vector<std::size_t>, std::span<double>)>& fn) {
  if (l.weights.empty()) return;
  fn(w, {l.out, l.in}, l.weights);
  fn(b, {l.out}, l.bias);
}

}  // namespace

DenseLayer DenseLayer::zeros(std::size_t out, std::size_t in) {
  return DenseLayer{in, out, std::vector<double>(out * in, 0.0), std::vector<double>(out, 0.0)};
}

DenseLayer DenseLayer::uniform_init(std::size_t out, std::size_t in, Rng& rng) {
  DenseLayer l = zeros(out, in);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& w : l.weights) w = dist(rng);
  for (auto& b : l.bias) b = dist(rng);
  return l;
}

std::vector<double> DenseLayer::apply(std::span<const double> x) const {
  if (x.size() != in) throw ShapeError("dense layer expects " + std::to_string(in) + " inputs, got " + std::to_string(x.size()));
  std::vector<double> y(bias);
  for (std::size_t o = 0; o < out; ++o) {
    const double* row = weights.data() + o * in;
    double acc = 0.0;
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] += acc;
  }
  return y;
}

HeadKind parse_head(std::string_view text) {
  if (text == "quantum") return HeadKind::quantum;
  if (text == "classical") return HeadKind::classical;
  throw ArgumentError("head must be quantum or classical, got '" + std::string(text) + "'");
}

Mode parse_mode(std::string_view text) {
  if (text == "stochastic") return Mode::stochastic;
  if (text == "expected") return Mode::expected;
  throw ArgumentError("mode must be expected or stochastic, got '" + std::string(text) + "'");
}

std::string_view to_string(HeadKind h) { return h == HeadKind::quantum ? "quantum" : "classical"; }
std::string_view to_string(Mode m) { return m == Mode::stochastic ? "stochastic" : "expected"; }

RqnnParams RqnnParams::zeros(const ModelConfig& cfg) {
  const auto nq = static_cast<std::size_t>(cfg.n_qubits);
  RqnnParams p;
  p.l1 = DenseLayer::zeros(cfg.hidden, cfg.input);
  p.l2 = DenseLayer::zeros(cfg.features, cfg.hidden);
  p.pre_input = DenseLayer::zeros(nq, cfg.features);
  if (cfg.head == HeadKind::quantum) {
    p.vqc = vqc::VqcParams::zeros(cfg.n_qubits, cfg.n_layers);
  } else {
    p.mixer = DenseLayer::zeros(nq, nq);
  }
  p.head = DenseLayer::zeros(static_cast<std::size_t>(cfg.n_classes), nq);
  return p;
}

void RqnnParams::for_each(
    const std::function<void(std::string_view, std::vector<std::size_t>, std::span<double>)>& fn) {
  visit_layer("l1.weight", "l1.bias", l1, fn);
  visit_layer("l2.weight", "l2.bias", l2, fn);
  visit_layer("pre_input.weight", "pre_input.bias", pre_input, fn);
  if (!vqc.theta.empty()) {
    fn("vqc.theta", {static_cast<std::size_t>(vqc.n_layers), static_cast<std::size_t>(vqc.n_qubits), 2}, vqc.theta);
  }
  visit_layer("mixer.weight", "mixer.bias", mixer, fn);
  visit_layer("head.weight", "head.bias", head, fn);
}

void RqnnParams::for_each(
    const std::function<void(std::string_view, std::vector<std::size_t>, std::span<const double>)>& fn) const {
  const_cast<RqnnParams*>(this)->for_each(
      [&](std::string_view name, std::vector<std::size_t> shape, std::span<double> v) {
        fn(name, std::move(shape), std::span<const double>(v));
      });
}

std::size_t RqnnParams::count() const {
  std::size_t n = 0;
  for_each([&](std::string_view, std::vector<std::size_t>, std::span<const double> v) { n += v.size(); });
  return n;
}

RqnnModel RqnnModel::create(const ModelConfig& cfg, Rng& rng) {
  RqnnModel m = zeros(cfg);
  const auto nq = static_cast<std::size_t>(cfg.n_qubits);
  m.params.l1 = DenseLayer::uniform_init(cfg.hidden, cfg.input, rng);
  m.params.l2 = DenseLayer::uniform_init(cfg.features, cfg.hidden, rng);
  m.params.pre_input = DenseLayer::uniform_init(nq, cfg.features, rng);
  if (cfg.head == HeadKind::quantum) {
    m.params.vqc = vqc::VqcParams::random_normal(cfg.n_qubits, cfg.n_layers, cfg.vqc_init_scale, rng);
  } else {
    m.params.mixer = DenseLayer::uniform_init(nq, nq, rng);
  }
  m.params.head = DenseLayer::uniform_init(static_cast<std::size_t>(cfg.n_classes), nq, rng);
  return m;
}

RqnnModel RqnnModel::zeros(const ModelConfig& cfg) {
  if (cfg.input == 0 || cfg.hidden == 0 || cfg.features == 0 || cfg.n_classes < 1 || cfg.spike_steps < 1 ||
      !(cfg.dt > 0.0)) {
    throw ArgumentError("model dimensions, spike steps and dt must be positive");
  }
  if (cfg.n_qubits < 1 || cfg.n_qubits > qsim::kMaxQubits || cfg.n_layers < 1) {
    throw ArgumentError("qubit count must lie in [1, 12] and layer count be >= 1");
  }
  RqnnModel m;
  m.config = cfg;
  m.params = RqnnParams::zeros(cfg);
  return m;
}

void validate(const RqnnModel& model) {
  const auto& c = model.config;
  const auto& p = model.params;
  const auto nq = static_cast<std::size_t>(c.n_qubits);
  check_layer(p.l1, c.hidden, c.input, "l1");
  check_layer(p.l2, c.features, c.hidden, "l2");
  check_layer(p.pre_input, nq, c.features, "pre_input");
  check_layer(p.head, static_cast<std::size_t>(c.n_classes), nq, "head");
  if (c.head == HeadKind::quantum) {
    if (p.vqc.n_qubits != c.n_qubits || p.vqc.n_layers != c.n_layers ||
        p.vqc.theta.size() != nq * static_cast<std::size_t>(c.n_layers) * 2) {
      throw ShapeError("vqc parameters do not match the configured circuit");
    }
  } else {
    check_layer(p.mixer, nq, nq, "mixer");
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double peak = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (auto& v : out) {
    v = std::exp(v - peak);
    total += v;
  }
  for (auto& v : out) v /= total;
  return out;
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("argmax of an empty vector");
  // max_element returns the first maximum, i.e. the smallest index on ties.
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

ForwardResult forward(const RqnnModel& model, std::span<const double> image, Rng& rng, Mode mode) {
  const auto& c = model.config;
  const auto& p = model.params;
  if (image.size() != c.input) {
    throw ShapeError("image has " + std::to_string(image.size()) + " pixels, model expects " + std::to_string(c.input));
  }
  ForwardCache cache;
  cache.input.assign(image.begin(), image.end());
  cache.potentials = p.l1.apply(image);
  cache.rates = mode == Mode::stochastic ? rnn::pooled_spike_rate(cache.potentials, c.spike_steps, c.dt, rng)
                                         : rnn::expected_rate(cache.potentials, c.dt);
  cache.features = p.l2.apply(cache.rates);
  cache.pre = p.pre_input.apply(cache.features);
  cache.omega.resize(cache.pre.size());
  for (std::size_t q = 0; q < cache.pre.size(); ++q) cache.omega[q] = kHalfPi * std::tanh(cache.pre[q]);

  if (c.head == HeadKind::quantum) {
    cache.quantum = vqc::forward(cache.omega, p.vqc);
  } else {
    cache.quantum = p.mixer.apply(cache.omega);
    for (auto& v : cache.quantum) v = std::tanh(v);
  }
  cache.logits = p.head.apply(cache.quantum);
  cache.probs = softmax(cache.logits);
  for (double v : cache.probs) {
    if (!std::isfinite(v)) throw NumericError("non-finite class probability");
  }
  cache.revision = model.revision;
  cache.valid = true;
  return ForwardResult{cache.probs, std::move(cache)};
}

ModelGradients backward(const RqnnModel& model, const ForwardCache& cache, int target) {
  if (!cache.valid) throw StateError("forward cache is empty");
  if (cache.revision != model.revision) throw StateError("forward cache was produced by an older model revision");
  const auto& c = model.config;
  const auto& p = model.params;
  if (cache.input.size() != c.input || cache.probs.size() != static_cast<std::size_t>(c.n_classes)) {
    throw StateError("forward cache does not belong to this model");
  }

  ModelGradients g = RqnnParams::zeros(c);

  // Loss -> softmax logits: dL/dl_i = z_i (dL/dz_i - sum_j dL/dz_j z_j).
  const auto dz = train::cross_entropy_grad(cache.probs, target);
  double dot = 0.0;
  for (std::size_t j = 0; j < dz.size(); ++j) dot += dz[j] * cache.probs[j];
  std::vector<double> dlogits(dz.size());
  for (std::size_t i = 0; i < dz.size(); ++i) dlogits[i] = cache.probs[i] * (dz[i] - dot);

  accumulate_outer(g.head, dlogits, cache.quantum);
  const auto dquantum = transpose_product(p.head, dlogits);

  std::vector<double> domega;
  if (c.head == HeadKind::quantum) {
    auto vg = vqc::parameter_shift_gradient(cache.omega, p.vqc, dquantum);
    g.vqc.theta = std::move(vg.theta);
    domega = std::move(vg.omega);
  } else {
    std::vector<double> dmix(dquantum.size());
    for (std::size_t i = 0; i < dmix.size(); ++i) dmix[i] = dquantum[i] * (1.0 - cache.quantum[i] * cache.quantum[i]);
    accumulate_outer(g.mixer, dmix, cache.omega);
    domega = transpose_product(p.mixer, dmix);
  }

  std::vector<double> dpre(domega.size());
  for (std::size_t q = 0; q < dpre.size(); ++q) {
    const double t = std::tanh(cache.pre[q]);
    dpre[q] = domega[q] * kHalfPi * (1.0 - t * t);
  }
  accumulate_outer(g.pre_input, dpre, cache.features);
  const auto dfeatures = transpose_product(p.pre_input, dpre);

  accumulate_outer(g.l2, dfeatures, cache.rates);
  const auto drates = transpose_product(p.l2, dfeatures);

  const auto dpot = rnn::rate_backward(drates, cache.potentials, c.dt);
  accumulate_outer(g.l1, dpot, cache.input);
  return g;
}

int predict(const RqnnModel& model, std::span<const double> image) {
  Rng unused(0);
  return argmax(forward(model, image, unused, Mode::expected).probs);
}

std::vector<double> classical_head_forward(const RqnnModel& model, std::span<const double> image) {
  if (model.config.head != HeadKind::classical) throw ArgumentError("model does not have a classical head");
  Rng unused(0);
  return forward(model, image, unused, Mode::expected).probs;
}

std::vector<int> predict_batch(const RqnnModel& model, std::span<const double> images) {
  const std::size_t px = model.config.input;
  if (px == 0 || images.size() % px != 0) throw ShapeError("image buffer is not a whole number of samples");
  const std::size_t n = images.size() / px;
  std::vector<int> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = predict(model, images.subspan(i * px, px)); });
  return out;
}

}  // namespace qspike::model
