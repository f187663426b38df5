#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qspike/data.hpp"
#include "qspike/loss.hpp"
#include "qspike/model.hpp"

namespace qspike::train {

struct AdamHyper {
  double lr = 0.003;
  double beta1 = 0.81;
  double beta2 = 0.88;
  double eps = 1e-8;
};

/// Bias-corrected Adam moments, one tensor per parameter tensor.
struct AdamState {
  std::uint64_t t = 0;
  AdamHyper hyper;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  /// Zero moments shaped like `shapes` (sizes of each parameter tensor).
  static AdamState zeros(std::span<const std::size_t> sizes, AdamHyper hyper = {});
  static AdamState for_model(const model::RqnnModel& model, AdamHyper hyper = {});
};

/// One Adam update over parallel lists of parameter and gradient tensors.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state);

/// Adam update of every model tensor; bumps the model revision.
void adam_step(model::RqnnModel& model, const model::ModelGradients& grads, AdamState& state);

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 32;
  /// 1 trains on everything and reports training-set metrics as "val".
  int folds = 5;
  std::uint64_t seed = 0;
  model::Mode mode = model::Mode::stochastic;
  AdamHyper adam;
};

struct EpochRecord {
  int fold = 0;
  int epoch = 0;
  std::string split;  // "train" or "val"
  double loss = 0.0;
  double accuracy = 0.0;
};

struct FoldResult {
  int best_epoch = -1;
  double best_val_accuracy = -1.0;
  model::RqnnModel best_model;
  AdamState best_optimizer;
};

struct TrainingReport {
  std::vector<EpochRecord> records;
  std::vector<FoldResult> folds;
  int best_fold = 0;

  const FoldResult& best() const { return folds.at(static_cast<std::size_t>(best_fold)); }
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<int> predictions;
};

/// Expected-mode loss, accuracy and predictions over a dataset.
Evaluation evaluate(const model::RqnnModel& model, const data::Dataset& ds);

/// k-fold training. Each fold starts from a copy of `init`, trains on the
/// other folds for cfg.epochs epochs of shuffled mini-batches, and validates on
/// the held-out fold after every epoch. Fully determined by cfg.seed.
TrainingReport fit(const model::RqnnModel& init, const data::Dataset& ds, const TrainConfig& cfg,
                   const std::function<void(const EpochRecord&)>& on_epoch = {});

/// `fold,epoch,split,loss,accuracy` rows.
void write_report_csv(const TrainingReport& report, const std::filesystem::path& path);

}  // namespace qspike::train
