#include "qspike/vqc.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qspike/error.hpp"

namespace qspike::vqc {

namespace {

enum class GateKind { hadamard, rx, rz, cnot };

struct Gate {
  GateKind kind;
  int q;
  int target;       // cnot only
  std::size_t slot; // index into the flat angle table (rotations only)
};

// Flat angle table layout: [enc_rx (n) | enc_rz (n) | theta (layers*n*2)].
struct Circuit {
  int n_qubits;
  std::vector<Gate> gates;
  std::vector<double> angles;
};

void check_shapes(std::span<const double> omega, const VqcParams& params) {
  if (params.n_qubits < 1 || params.n_layers < 1) throw ShapeError("VQC needs at least one qubit and one layer");
  if (params.theta.size() != static_cast<std::size_t>(params.n_layers) * params.n_qubits * 2) {
    throw ShapeError("theta holds " + std::to_string(params.theta.size()) + " angles, expected " +
                     std::to_string(params.n_layers * params.n_qubits * 2));
  }
  if (omega.size() != static_cast<std::size_t>(params.n_qubits)) {
    throw ShapeError("encoding has " + std::to_string(omega.size()) + " angles for " +
                     std::to_string(params.n_qubits) + " qubits");
  }
}

Circuit build_circuit(std::span<const double> omega, const VqcParams& params) {
  const int n = params.n_qubits;
  Circuit c{n, {}, {}};
  c.angles.reserve(2 * n + params.theta.size());
  c.angles.insert(c.angles.end(), omega.begin(), omega.end());
  c.angles.insert(c.angles.end(), omega.begin(), omega.end());
  c.angles.insert(c.angles.end(), params.theta.begin(), params.theta.end());

  for (int q = 0; q < n; ++q) {
    c.gates.push_back({GateKind::hadamard, q, 0, 0});
    c.gates.push_back({GateKind::rx, q, 0, static_cast<std::size_t>(q)});
    c.gates.push_back({GateKind::rz, q, 0, static_cast<std::size_t>(n + q)});
  }
  for (int l = 0; l < params.n_layers; ++l) {
    if (n > 1) {
      for (int q = 0; q < n; ++q) c.gates.push_back({GateKind::cnot, q, (q + 1) % n, 0});
    }
    for (int q = 0; q < n; ++q) {
      c.gates.push_back({GateKind::rx, q, 0, 2 * static_cast<std::size_t>(n) + params.index(l, q, 0)});
      c.gates.push_back({GateKind::rz, q, 0, 2 * static_cast<std::size_t>(n) + params.index(l, q, 1)});
    }
  }
  return c;
}

void apply_gate(qsim::StateVector& s, const Gate& g, double angle) {
  switch (g.kind) {
    case GateKind::hadamard: s.apply_hadamard(g.q); break;
    case GateKind::rx: s.apply_rx(g.q, angle); break;
    case GateKind::rz: s.apply_rz(g.q, angle); break;
    case GateKind::cnot: s.apply_cnot(g.q, g.target); break;
  }
}

void run_from(qsim::StateVector& s, const Circuit& c, std::size_t first) {
  for (std::size_t i = first; i < c.gates.size(); ++i) apply_gate(s, c.gates[i], c.angles[c.gates[i].slot]);
}

double weighted_readout(const qsim::StateVector& s, std::span<const double> upstream) {
  double acc = 0.0;
  for (int q = 0; q < s.n_qubits(); ++q) acc += upstream[q] * s.expectation_z(q);
  return acc;
}

}  // namespace

VqcParams VqcParams::zeros(int n_qubits, int n_layers) {
  if (n_qubits < 1 || n_qubits > qsim::kMaxQubits || n_layers < 1) {
    throw ArgumentError("invalid VQC shape " + std::to_string(n_qubits) + "x" + std::to_string(n_layers));
  }
  return VqcParams{n_qubits, n_layers, std::vector<double>(static_cast<std::size_t>(n_qubits) * n_layers * 2, 0.0)};
}

VqcParams VqcParams::random_normal(int n_qubits, int n_layers, double scale, std::mt19937_64& rng) {
  VqcParams p = zeros(n_qubits, n_layers);
  if (scale > 0) {
    std::normal_distribution<double> dist(0.0, scale);
    for (auto& t : p.theta) t = dist(rng);
  }
  return p;
}

std::span<const double> VqcParams::layer(int l) const {
  if (l < 0 || l >= n_layers) throw IndexError("layer " + std::to_string(l));
  return std::span<const double>(theta).subspan(static_cast<std::size_t>(l) * n_qubits * 2,
                                                static_cast<std::size_t>(n_qubits) * 2);
}

qsim::StateVector encode(std::span<const double> omega) {
  const int n = static_cast<int>(omega.size());
  if (n < 1 || n > qsim::kMaxQubits) throw ShapeError("encoding needs 1.." + std::to_string(qsim::kMaxQubits) + " angles");
  auto s = qsim::StateVector::zero(n);
  for (int q = 0; q < n; ++q) {
    s.apply_hadamard(q);
    s.apply_rx(q, omega[q]);
    s.apply_rz(q, omega[q]);
  }
  return s;
}

qsim::StateVector variational_block(qsim::StateVector state, std::span<const double> layer_theta) {
  const int n = state.n_qubits();
  if (layer_theta.size() != static_cast<std::size_t>(2 * n)) {
    throw ShapeError("layer needs " + std::to_string(2 * n) + " angles, got " + std::to_string(layer_theta.size()));
  }
  if (n > 1) {
    for (int q = 0; q < n; ++q) state.apply_cnot(q, (q + 1) % n);
  }
  for (int q = 0; q < n; ++q) {
    state.apply_rx(q, layer_theta[2 * q]);
    state.apply_rz(q, layer_theta[2 * q + 1]);
  }
  return state;
}

std::vector<double> expectations(const qsim::StateVector& state) {
  std::vector<double> out(state.n_qubits());
  for (int q = 0; q < state.n_qubits(); ++q) out[q] = state.expectation_z(q);
  return out;
}

std::vector<double> forward(std::span<const double> omega, const VqcParams& params) {
  check_shapes(omega, params);
  auto s = encode(omega);
  for (int l = 0; l < params.n_layers; ++l) s = variational_block(std::move(s), params.layer(l));
  return expectations(s);
}

VqcGradient parameter_shift_gradient(std::span<const double> omega, const VqcParams& params,
                                     std::span<const double> upstream) {
  check_shapes(omega, params);
  const int n = params.n_qubits;
  if (upstream.size() != static_cast<std::size_t>(n)) throw ShapeError("upstream must have one entry per qubit");

  const Circuit c = build_circuit(omega, params);
  std::vector<double> slot_grad(c.angles.size(), 0.0);

  bool any = false;
  for (double u : upstream) any = any || u != 0.0;
  if (any) {
    constexpr double shift = std::numbers::pi / 2;
    // `prefix` holds the state just before gate i.
    auto prefix = qsim::StateVector::zero(n);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
      const Gate& g = c.gates[i];
      const double angle = c.angles[g.slot];
      if (g.kind == GateKind::rx || g.kind == GateKind::rz) {
        auto plus = prefix;
        apply_gate(plus, g, angle + shift);
        run_from(plus, c, i + 1);
        auto minus = prefix;
        apply_gate(minus, g, angle - shift);
        run_from(minus, c, i + 1);
        slot_grad[g.slot] += 0.5 * (weighted_readout(plus, upstream) - weighted_readout(minus, upstream));
      }
      apply_gate(prefix, g, angle);
    }
  }

  VqcGradient grad;
  grad.omega.resize(n);
  for (int q = 0; q < n; ++q) grad.omega[q] = slot_grad[q] + slot_grad[n + q];
  grad.theta.assign(slot_grad.begin() + 2 * n, slot_grad.end());
  return grad;
}

}  // namespace qspike::vqc
