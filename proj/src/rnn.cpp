#include "qspike/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qspike/error.hpp"

namespace qspike::rnn {

GelenbeNetwork GelenbeNetwork::empty(std::size_t n) {
  GelenbeNetwork net;
  net.n = n;
  net.mu.assign(n, 0.0);
  net.lambda_plus.assign(n, 0.0);
  net.lambda_minus.assign(n, 0.0);
  net.p_plus.assign(n * n, 0.0);
  net.p_minus.assign(n * n, 0.0);
  net.d.assign(n, 1.0);
  return net;
}

void validate_routing(const GelenbeNetwork& net) {
  const std::size_t n = net.n;
  if (n == 0) throw ValidationError("network has no neurons");
  if (net.mu.size() != n || net.lambda_plus.size() != n || net.lambda_minus.size() != n || net.d.size() != n ||
      net.p_plus.size() != n * n || net.p_minus.size() != n * n) {
    throw ShapeError("network arrays do not match neuron count " + std::to_string(n));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::string who = "neuron " + std::to_string(k);
    if (!(net.mu[k] >= 0) || !(net.lambda_plus[k] >= 0) || !(net.lambda_minus[k] >= 0) || !(net.d[k] >= 0)) {
      throw ValidationError(who + ": rates and departure probability must be nonnegative");
    }
    if (net.plus(k, k) != 0.0 || net.minus(k, k) != 0.0) throw ValidationError(who + ": self-loop routing");
    double row = net.d[k];
    for (std::size_t j = 0; j < n; ++j) {
      if (!(net.plus(k, j) >= 0) || !(net.minus(k, j) >= 0)) {
        throw ValidationError(who + ": negative routing probability to neuron " + std::to_string(j));
      }
      row += net.plus(k, j) + net.minus(k, j);
    }
    if (std::abs(row - 1.0) > kRoutingTolerance) {
      throw ValidationError(who + ": routing row sums to " + std::to_string(row) + ", expected 1");
    }
  }
}

StepEvent gelenbe_step(const GelenbeNetwork& net, NeuronState& state, Rng& rng) {
  const std::size_t n = net.n;
  if (state.alpha.size() != n) throw ShapeError("neuron state size does not match network");

  // Clocks: [lambda+ (n) | lambda- (n) | mu of excited neurons (n)].
  std::vector<double> rates(3 * n, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    rates[k] = net.lambda_plus[k];
    rates[n + k] = net.lambda_minus[k];
    rates[2 * n + k] = state.alpha[k] > 0 ? net.mu[k] : 0.0;
  }
  for (double r : rates) total += r;
  if (!(total > 0.0)) throw NumericError("no event can occur: all arrival rates are zero and no neuron is excited");

  const double elapsed = std::exponential_distribution<double>(total)(rng);
  std::discrete_distribution<std::size_t> pick(rates.begin(), rates.end());
  const std::size_t clock = pick(rng);
  const std::size_t k = clock % n;

  StepEvent ev{EventKind::fire, k, Route::none, 0, elapsed};
  if (clock < n) {
    ev.kind = EventKind::excitatory_arrival;
    state.alpha[k] += 1;
    return ev;
  }
  if (clock < 2 * n) {
    ev.kind = EventKind::inhibitory_arrival;
    state.alpha[k] = std::max<std::int64_t>(state.alpha[k] - 1, 0);
    return ev;
  }

  state.alpha[k] -= 1;
  // Destination weights: [p+(k, .) | p-(k, .) | d(k)].
  std::vector<double> dest(2 * n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    dest[j] = net.plus(k, j);
    dest[n + j] = net.minus(k, j);
  }
  dest[2 * n] = net.d[k];
  const std::size_t where = std::discrete_distribution<std::size_t>(dest.begin(), dest.end())(rng);
  if (where == 2 * n) {
    ev.route = Route::depart;
  } else if (where < n) {
    ev.route = Route::excite;
    ev.target = where;
    state.alpha[where] += 1;
  } else {
    ev.route = Route::inhibit;
    ev.target = where - n;
    state.alpha[ev.target] = std::max<std::int64_t>(state.alpha[ev.target] - 1, 0);
  }
  return ev;
}

namespace {

void check_spiking_args(std::span<const double> potentials, std::size_t steps, double dt) {
  if (steps < 1) throw ArgumentError("spike train needs at least one time step");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("dt must be positive and finite");
  for (double x : potentials) {
    if (!std::isfinite(x)) throw ArgumentError("non-finite membrane potential");
  }
}

double spike_probability(double x, double dt) { return std::min(std::max(x, 0.0) * dt, 1.0); }

}  // namespace

SpikeTrain spiking_relu_forward(std::span<const double> potentials, std::size_t steps, double dt, Rng& rng) {
  check_spiking_args(potentials, steps, dt);
  const std::size_t units = potentials.size();
  SpikeTrain train{steps, units, dt, std::vector<std::uint8_t>(steps * units, 0)};
  std::vector<double> prob(units);
  for (std::size_t u = 0; u < units; ++u) prob[u] = spike_probability(potentials[u], dt);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t u = 0; u < units; ++u) {
      // One draw per (t, u) regardless of probability keeps the stream layout fixed.
      const double r = unif(rng);
      train.counts[t * units + u] = r < prob[u] ? 1 : 0;
    }
  }
  return train;
}

std::vector<double> temporal_pool(const SpikeTrain& train) {
  if (train.steps == 0 || train.counts.size() != train.steps * train.units) {
    throw ShapeError("spike train is empty or inconsistent");
  }
  std::vector<double> pooled(train.units, 0.0);
  for (std::size_t t = 0; t < train.steps; ++t) {
    for (std::size_t u = 0; u < train.units; ++u) pooled[u] += train.at(t, u);
  }
  for (auto& p : pooled) p /= static_cast<double>(train.steps);
  return pooled;
}

std::vector<double> pooled_spike_rate(std::span<const double> potentials, std::size_t steps, double dt, Rng& rng) {
  check_spiking_args(potentials, steps, dt);
  const std::size_t units = potentials.size();
  std::vector<double> prob(units);
  for (std::size_t u = 0; u < units; ++u) prob[u] = spike_probability(potentials[u], dt);
  std::vector<std::size_t> hits(units, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t u = 0; u < units; ++u) hits[u] += unif(rng) < prob[u] ? 1 : 0;
  }
  std::vector<double> pooled(units);
  for (std::size_t u = 0; u < units; ++u) pooled[u] = static_cast<double>(hits[u]) / static_cast<double>(steps);
  return pooled;
}

std::vector<double> expected_rate(std::span<const double> potentials, double dt) {
  std::vector<double> out(potentials.size());
  for (std::size_t u = 0; u < potentials.size(); ++u) out[u] = spike_probability(potentials[u], dt);
  return out;
}

std::vector<double> rate_backward(std::span<const double> upstream, std::span<const double> potentials, double dt) {
  if (upstream.size() != potentials.size()) throw ShapeError("upstream and potentials differ in length");
  std::vector<double> out(upstream.size());
  for (std::size_t u = 0; u < upstream.size(); ++u) {
    const double x = potentials[u];
    out[u] = (x > 0.0 && x * dt < 1.0) ? upstream[u] * dt : 0.0;
  }
  return out;
}

}  // namespace qspike::rnn
