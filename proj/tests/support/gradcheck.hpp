#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qspike/loss.hpp"
#include "qspike/model.hpp"

namespace gradcheck {

struct Worst {
  double rel = 0;
  std::string tensor;
  std::size_t index = 0;
};

inline double expected_loss(const qspike::model::RqnnModel& m, std::span<const double> image, int target) {
  qspike::model::Rng unused(0);
  const auto r = qspike::model::forward(m, image, unused, qspike::model::Mode::expected);
  return oracle::bce(r.probs, target);
}

// Largest |analytic - FD| / max(|analytic|, |FD|, floor) over every parameter.
inline Worst compare(const qspike::model::RqnnModel& m, std::span<const double> image, int target,
                     double eps = 1e-6, double floor = 1e-6) {
  qspike::model::Rng unused(0);
  const auto fwd = qspike::model::forward(m, image, unused, qspike::model::Mode::expected);
  const auto grads = qspike::model::backward(m, fwd.cache, target);
  std::vector<std::vector<double>> analytic;
  grads.for_each([&](std::string_view, std::vector<std::size_t>, std::span<const double> g) {
    analytic.emplace_back(g.begin(), g.end());
  });

  Worst worst;
  auto probe = m;
  std::size_t t = 0;
  probe.params.for_each([&](std::string_view name, std::vector<std::size_t>, std::span<double> p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double x0 = p[i];
      p[i] = x0 + eps;
      const double up = expected_loss(probe, image, target);
      p[i] = x0 - eps;
      const double down = expected_loss(probe, image, target);
      p[i] = x0;
      const double fd = (up - down) / (2 * eps);
      const double a = analytic[t][i];
      const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), floor});
      if (rel > worst.rel) worst = {rel, std::string(name), i};
    }
    ++t;
  });
  return worst;
}

}  // namespace gradcheck
