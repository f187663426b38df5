#pragma once

#include <span>
#include <vector>

namespace qspike::train {

inline constexpr double kProbClamp = 1e-7;

/// Per-class binary cross-entropy against a one-hot target:
///   L = -sum_j [g_j log z_j + (1 - g_j) log(1 - z_j)]
/// with z clamped to [1e-7, 1 - 1e-7]. Nonnegative; zero only in the limit of
/// a perfect prediction.
double cross_entropy(std::span<const double> probs, int target);

/// dL/dz_j. Entries whose probability sits outside the clamp band get zero,
/// matching the flat clamped loss there.
std::vector<double> cross_entropy_grad(std::span<const double> probs, int target);

}  // namespace qspike::train
