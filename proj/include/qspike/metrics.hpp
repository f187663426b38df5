#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qspike::metrics {

/// counts[t * C + p]: samples of true class t predicted as p.
struct ConfusionMatrix {
  int n_classes = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t at(int truth, int pred) const { return counts[static_cast<std::size_t>(truth) * n_classes + pred]; }
  std::uint64_t total() const;
};

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, int n_classes);

struct ClassStats {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double ppv = 0, ss = 0, dsc = 0, acc = 0;
};

/// One-vs-rest counts and ratios for class c; 0/0 ratios are 0.
ClassStats class_stats(const ConfusionMatrix& cm, int c);

struct MetricBundle {
  double acc = 0, dsc = 0, ppv = 0, ss = 0;
};

enum class Averaging { macro, micro };

/// Macro: unweighted mean of per-class ratios. Micro: ratios of summed counts.
MetricBundle bundle(const ConfusionMatrix& cm, Averaging avg = Averaging::macro);

// --- Wilcoxon signed-rank ---------------------------------------------------

enum class WilcoxonMethod { automatic, exact, normal };

inline constexpr std::size_t kExactLimit = 20;

struct WilcoxonResult {
  double w_statistic = 0;  // min(W+, W-)
  double w_plus = 0;
  double w_minus = 0;
  double p_value = 1;
  std::size_t n_effective = 0;
  WilcoxonMethod method = WilcoxonMethod::exact;
};

/// Two-sided paired test on d = x - y. Zero differences are dropped, tied
/// |d| share the average rank. `automatic` uses the exact null distribution
/// for n_effective <= 20 and the tie- and continuity-corrected normal
/// approximation above that.
WilcoxonResult wilcoxon(std::span<const double> x, std::span<const double> y,
                        WilcoxonMethod method = WilcoxonMethod::automatic);

/// Average ranks (1-based) of the values; ties share their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace qspike::metrics
