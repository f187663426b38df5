#include "qspike/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "qspike/csv.hpp"
#include "qspike/error.hpp"
#include "qspike/parallel.hpp"
#include "qspike/seed.hpp"

namespace qspike::train {

namespace {

std::vector<std::span<double>> tensors_of(model::RqnnParams& p) {
  std::vector<std::span<double>> out;
  p.for_each([&](std::string_view, std::vector<std::size_t>, std::span<double> v) { out.push_back(v); });
  return out;
}

std::vector<std::span<const double>> tensors_of(const model::RqnnParams& p) {
  std::vector<std::span<const double>> out;
  p.for_each([&](std::string_view, std::vector<std::size_t>, std::span<const double> v) { out.push_back(v); });
  return out;
}

// acc += g
void accumulate(model::RqnnParams& acc, const model::RqnnParams& g) {
  auto dst = tensors_of(acc);
  auto src = tensors_of(g);
  for (std::size_t t = 0; t < dst.size(); ++t) {
    for (std::size_t i = 0; i < dst[t].size(); ++i) dst[t][i] += src[t][i];
  }
}

void scale(model::RqnnParams& p, double s) {
  for (auto t : tensors_of(p)) {
    for (auto& v : t) v *= s;
  }
}

struct SampleOutcome {
  model::ModelGradients grads;
  double loss = 0.0;
  bool correct = false;
};

}  // namespace

AdamState AdamState::zeros(std::span<const std::size_t> sizes, AdamHyper hyper) {
  AdamState s;
  s.hyper = hyper;
  for (std::size_t n : sizes) {
    s.m.emplace_back(n, 0.0);
    s.v.emplace_back(n, 0.0);
  }
  return s;
}

AdamState AdamState::for_model(const model::RqnnModel& model, AdamHyper hyper) {
  std::vector<std::size_t> sizes;
  for (auto t : tensors_of(model.params)) sizes.push_back(t.size());
  return zeros(sizes, hyper);
}

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() || params.size() != state.v.size()) {
    throw ShapeError("Adam: parameter, gradient and moment tensor counts differ");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size() != grads[t].size() || params[t].size() != state.m[t].size() ||
        params[t].size() != state.v[t].size()) {
      throw ShapeError("Adam: tensor " + std::to_string(t) + " shape mismatch");
    }
  }
  const auto& h = state.hyper;
  state.t += 1;
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto p = params[t];
    auto g = grads[t];
    auto& m = state.m[t];
    auto& v = state.v[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
    }
  }
}

void adam_step(model::RqnnModel& model, const model::ModelGradients& grads, AdamState& state) {
  const auto p = tensors_of(model.params);
  const auto g = tensors_of(grads);
  adam_step(p, g, state);
  for (auto t : p) {
    for (double v : t) {
      if (!std::isfinite(v)) throw NumericError("non-finite parameter after optimizer step");
    }
  }
  ++model.revision;
}

Evaluation evaluate(const model::RqnnModel& model, const data::Dataset& ds) {
  Evaluation ev;
  const std::size_t n = ds.size();
  if (n == 0) return ev;
  ev.predictions.resize(n);
  std::vector<double> losses(n);
  parallel_for(n, [&](std::size_t i) {
    model::Rng unused(0);
    const auto probs = model::forward(model, ds.image(i), unused, model::Mode::expected).probs;
    losses[i] = cross_entropy(probs, ds.labels[i]);
    ev.predictions[i] = model::argmax(probs);
  });
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ev.loss += losses[i];
    correct += ev.predictions[i] == ds.labels[i] ? 1 : 0;
  }
  ev.loss /= static_cast<double>(n);
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return ev;
}

TrainingReport fit(const model::RqnnModel& init, const data::Dataset& ds, const TrainConfig& cfg,
                   const std::function<void(const EpochRecord&)>& on_epoch) {
  if (ds.size() == 0) throw ArgumentError("cannot train on an empty dataset");
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.folds < 1) {
    throw ArgumentError("epochs, batch size and folds must be positive");
  }
  model::validate(init);
  if (ds.pixels() != init.config.input) throw ShapeError("dataset image size does not match model input");
  for (int l : ds.labels) {
    if (l < 0 || l >= init.config.n_classes) throw ArgumentError("label " + std::to_string(l) + " exceeds class count");
  }

  data::FoldPlan plan;
  if (cfg.folds > 1) plan = data::kfold_splits(ds.size(), cfg.folds, derive_seed(cfg.seed, {0xf01d}));

  TrainingReport report;
  for (int fold = 0; fold < cfg.folds; ++fold) {
    std::vector<std::size_t> train_idx;
    data::Dataset val;
    if (cfg.folds > 1) {
      train_idx = plan.complement(fold);
      const auto val_idx = plan.members(fold);
      val = data::select(ds, val_idx);
    } else {
      train_idx.resize(ds.size());
      std::iota(train_idx.begin(), train_idx.end(), std::size_t{0});
      val = ds;
    }

    model::RqnnModel m = init;
    AdamState opt = AdamState::for_model(m, cfg.adam);
    FoldResult result;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::vector<std::size_t> order = train_idx;
      std::mt19937_64 shuffler(derive_seed(cfg.seed, {static_cast<std::uint64_t>(fold), static_cast<std::uint64_t>(epoch)}));
      std::shuffle(order.begin(), order.end(), shuffler);

      double loss_sum = 0.0;
      std::size_t correct = 0;
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t count = std::min(cfg.batch_size, order.size() - start);
        std::vector<SampleOutcome> outcomes(count);
        parallel_for(count, [&](std::size_t b) {
          const std::size_t idx = order[start + b];
          model::Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(fold), static_cast<std::uint64_t>(epoch),
                                                static_cast<std::uint64_t>(idx), 0x5a11}));
          auto fr = model::forward(m, ds.image(idx), rng, cfg.mode);
          outcomes[b].loss = cross_entropy(fr.probs, ds.labels[idx]);
          outcomes[b].correct = model::argmax(fr.probs) == ds.labels[idx];
          outcomes[b].grads = model::backward(m, fr.cache, ds.labels[idx]);
        });
        // Reduce in sample order for reproducibility.
        model::ModelGradients total = model::RqnnParams::zeros(m.config);
        for (const auto& o : outcomes) {
          accumulate(total, o.grads);
          loss_sum += o.loss;
          correct += o.correct ? 1 : 0;
        }
        scale(total, 1.0 / static_cast<double>(count));
        adam_step(m, total, opt);
      }

      const EpochRecord train_rec{fold, epoch, "train", loss_sum / static_cast<double>(order.size()),
                                  static_cast<double>(correct) / static_cast<double>(order.size())};
      const Evaluation ev = evaluate(m, val);
      const EpochRecord val_rec{fold, epoch, "val", ev.loss, ev.accuracy};
      report.records.push_back(train_rec);
      report.records.push_back(val_rec);
      if (on_epoch) {
        on_epoch(train_rec);
        on_epoch(val_rec);
      }
      if (ev.accuracy > result.best_val_accuracy) {
        result.best_val_accuracy = ev.accuracy;
        result.best_epoch = epoch;
        result.best_model = m;
        result.best_optimizer = opt;
      }
    }
    report.folds.push_back(std::move(result));
  }

  for (std::size_t f = 1; f < report.folds.size(); ++f) {
    if (report.folds[f].best_val_accuracy > report.folds[report.best_fold].best_val_accuracy) {
      report.best_fold = static_cast<int>(f);
    }
  }
  return report;
}

void write_report_csv(const TrainingReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "fold,epoch,split,loss,accuracy\n";
  for (const auto& r : report.records) {
    out << r.fold << ',' << r.epoch << ',' << r.split << ',' << csv::format(r.loss) << ','
        << csv::format(r.accuracy) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace qspike::train
