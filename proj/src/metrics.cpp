#include "qspike/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qspike/error.hpp"

namespace qspike::metrics {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, int n_classes) {
  if (n_classes < 1) throw ArgumentError("class count must be positive");
  if (preds.size() != truth.size()) throw ShapeError("predictions and labels differ in length");
  ConfusionMatrix cm{n_classes, std::vector<std::uint64_t>(static_cast<std::size_t>(n_classes) * n_classes, 0)};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || preds[i] < 0 || preds[i] >= n_classes) {
      throw ArgumentError("label out of range at sample " + std::to_string(i));
    }
    cm.counts[static_cast<std::size_t>(truth[i]) * n_classes + preds[i]] += 1;
  }
  return cm;
}

ClassStats class_stats(const ConfusionMatrix& cm, int c) {
  if (c < 0 || c >= cm.n_classes) throw IndexError("class " + std::to_string(c));
  ClassStats s;
  const std::uint64_t n = cm.total();
  for (int t = 0; t < cm.n_classes; ++t) {
    for (int p = 0; p < cm.n_classes; ++p) {
      const auto v = cm.at(t, p);
      if (t == c && p == c) s.tp += v;
      else if (p == c) s.fp += v;
      else if (t == c) s.fn += v;
    }
  }
  s.tn = n - s.tp - s.fp - s.fn;
  const double tp = static_cast<double>(s.tp), fp = static_cast<double>(s.fp), fn = static_cast<double>(s.fn);
  s.ppv = ratio(tp, tp + fp);
  s.ss = ratio(tp, tp + fn);
  s.dsc = ratio(2 * tp, 2 * tp + fp + fn);
  s.acc = ratio(tp + static_cast<double>(s.tn), static_cast<double>(n));
  return s;
}

MetricBundle bundle(const ConfusionMatrix& cm, Averaging avg) {
  if (cm.n_classes < 1 || cm.counts.size() != static_cast<std::size_t>(cm.n_classes) * cm.n_classes) {
    throw ArgumentError("malformed confusion matrix");
  }
  if (cm.total() == 0) throw ArgumentError("confusion matrix is empty");
  MetricBundle b;
  if (avg == Averaging::macro) {
    for (int c = 0; c < cm.n_classes; ++c) {
      const auto s = class_stats(cm, c);
      b.acc += s.acc;
      b.dsc += s.dsc;
      b.ppv += s.ppv;
      b.ss += s.ss;
    }
    const double k = cm.n_classes;
    b.acc /= k;
    b.dsc /= k;
    b.ppv /= k;
    b.ss /= k;
    return b;
  }
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (int c = 0; c < cm.n_classes; ++c) {
    const auto s = class_stats(cm, c);
    tp += static_cast<double>(s.tp);
    fp += static_cast<double>(s.fp);
    fn += static_cast<double>(s.fn);
    tn += static_cast<double>(s.tn);
  }
  b.ppv = ratio(tp, tp + fp);
  b.ss = ratio(tp, tp + fn);
  b.dsc = ratio(2 * tp, 2 * tp + fp + fn);
  b.acc = ratio(tp + tn, tp + fp + fn + tn);
  return b;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

WilcoxonResult wilcoxon(std::span<const double> x, std::span<const double> y, WilcoxonMethod method) {
  if (x.size() != y.size()) throw ShapeError("paired samples differ in length");
  if (x.empty()) throw ArgumentError("paired samples are empty");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (!std::isfinite(d)) throw ArgumentError("non-finite paired difference");
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult res;
  res.n_effective = diffs.size();
  if (diffs.empty()) {
    res.method = method == WilcoxonMethod::normal ? WilcoxonMethod::normal : WilcoxonMethod::exact;
    return res;
  }

  std::vector<double> mags(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) mags[i] = std::abs(diffs[i]);
  const auto ranks = average_ranks(mags);
  for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];
  res.w_statistic = std::min(res.w_plus, res.w_minus);

  const std::size_t n = diffs.size();
  const bool exact = method == WilcoxonMethod::exact || (method == WilcoxonMethod::automatic && n <= kExactLimit);
  if (exact) {
    res.method = WilcoxonMethod::exact;
    // Doubled ranks are integers even with ties; count sign assignments by
    // their doubled W+ with a subset-sum table.
    std::vector<std::size_t> r2(n);
    std::size_t total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
      total2 += r2[i];
    }
    std::vector<double> ways(total2 + 1, 0.0);
    ways[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : r2) {
      for (std::size_t s = reach + 1; s-- > 0;) {
        if (ways[s] != 0.0) ways[s + r] += ways[s];
      }
      reach += r;
    }
    const auto w2 = static_cast<std::size_t>(std::lround(2.0 * res.w_statistic));
    double tail = 0.0;
    for (std::size_t s = 0; s <= w2; ++s) tail += ways[s];
    res.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
    return res;
  }

  res.method = WilcoxonMethod::normal;
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1) / 4.0;
  double var = nn * (nn + 1) * (2 * nn + 1) / 24.0;
  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  if (var <= 0.0) return res;
  const double z = std::min(0.0, res.w_statistic - mean + 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
  return res;
}

}  // namespace qspike::metrics
