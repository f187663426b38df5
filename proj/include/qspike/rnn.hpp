#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qspike::rnn {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Event-driven Gelenbe random neural network.
// ---------------------------------------------------------------------------

/// Rates and routing of an n-neuron network. Matrices are row-major n x n,
/// row k describing where a spike fired by neuron k goes.
struct GelenbeNetwork {
  std::size_t n = 0;
  std::vector<double> mu;            // firing rate per neuron
  std::vector<double> lambda_plus;   // external excitatory arrival rate
  std::vector<double> lambda_minus;  // external inhibitory arrival rate
  std::vector<double> p_plus;        // n*n
  std::vector<double> p_minus;       // n*n
  std::vector<double> d;             // departure probability per neuron

  static GelenbeNetwork empty(std::size_t n);
  double& plus(std::size_t k, std::size_t j) { return p_plus[k * n + j]; }
  double& minus(std::size_t k, std::size_t j) { return p_minus[k * n + j]; }
  double plus(std::size_t k, std::size_t j) const { return p_plus[k * n + j]; }
  double minus(std::size_t k, std::size_t j) const { return p_minus[k * n + j]; }
};

/// Internal excitation alpha_k of each neuron.
struct NeuronState {
  std::vector<std::int64_t> alpha;
};

inline constexpr double kRoutingTolerance = 1e-9;

/// Checks shapes, nonnegativity, absence of self-loops and that every row's
/// outgoing probabilities plus departure sum to one. Throws ValidationError
/// naming the first offending neuron.
void validate_routing(const GelenbeNetwork& net);

enum class EventKind { excitatory_arrival, inhibitory_arrival, fire };
enum class Route { excite, inhibit, depart, none };

struct StepEvent {
  EventKind kind;
  std::size_t neuron;         // receiver for arrivals, firer for fire events
  Route route = Route::none;  // fire events only
  std::size_t target = 0;     // fire events routed to another neuron
  double elapsed = 0.0;       // exponential holding time before the event
};

/// Advances the chain by one event. Arrivals and firings of excited neurons
/// race as independent exponential clocks; the winner is applied to `state`.
/// Inhibitory spikes never drive alpha below zero. Throws NumericError when no
/// event can occur.
StepEvent gelenbe_step(const GelenbeNetwork& net, NeuronState& state, Rng& rng);

// ---------------------------------------------------------------------------
// Discrete-time spiking ReLU used by the trainable layers.
// ---------------------------------------------------------------------------

/// T x U spike counts, row-major by time step.
struct SpikeTrain {
  std::size_t steps = 0;
  std::size_t units = 0;
  double dt = 1.0;
  std::vector<std::uint8_t> counts;

  std::uint8_t at(std::size_t t, std::size_t u) const { return counts[t * units + u]; }
};

/// Bernoulli spikes with probability min(max(x, 0) * dt, 1) per unit and step.
SpikeTrain spiking_relu_forward(std::span<const double> potentials, std::size_t steps, double dt, Rng& rng);

/// Per-unit mean spike count over time.
std::vector<double> temporal_pool(const SpikeTrain& train);

/// Spike-then-pool without materialising the train; same draws, same result as
/// temporal_pool(spiking_relu_forward(...)).
std::vector<double> pooled_spike_rate(std::span<const double> potentials, std::size_t steps, double dt, Rng& rng);

/// Expected pooled rate min(max(x, 0) * dt, 1).
std::vector<double> expected_rate(std::span<const double> potentials, double dt);

/// Gradient of the expected rate: upstream * dt * 1[0 < x * dt < 1].
/// With dt = 1 and unsaturated units this is upstream * 1[x > 0].
std::vector<double> rate_backward(std::span<const double> upstream, std::span<const double> potentials,
                                  double dt = 1.0);

}  // namespace qspike::rnn
