#include "qspike/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qspike/error.hpp"

namespace qspike::train {

namespace {

void check_target(std::span<const double> probs, int target) {
  if (probs.empty()) throw ArgumentError("empty probability vector");
  if (target < 0 || static_cast<std::size_t>(target) >= probs.size()) {
    throw ArgumentError("target class " + std::to_string(target) + " out of range for " +
                        std::to_string(probs.size()) + " classes");
  }
}

}  // namespace

double cross_entropy(std::span<const double> probs, int target) {
  check_target(probs, target);
  double loss = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double z = std::clamp(probs[j], kProbClamp, 1.0 - kProbClamp);
    loss -= static_cast<int>(j) == target ? std::log(z) : std::log1p(-z);
  }
  return loss;
}

std::vector<double> cross_entropy_grad(std::span<const double> probs, int target) {
  check_target(probs, target);
  std::vector<double> g(probs.size(), 0.0);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double z = probs[j];
    if (z <= kProbClamp || z >= 1.0 - kProbClamp) continue;
    g[j] = static_cast<int>(j) == target ? -1.0 / z : 1.0 / (1.0 - z);
  }
  return g;
}

}  // namespace qspike::train
