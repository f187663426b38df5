#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "qspike/qsim.hpp"

namespace qspike::vqc {

/// Trainable rotation angles of the variational blocks.
///
/// Stored flat as theta[layer][qubit][k], k = 0 for the Rx angle and k = 1 for
/// the Rz angle of that qubit.
struct VqcParams {
  int n_qubits = 0;
  int n_layers = 0;
  std::vector<double> theta;

  static VqcParams zeros(int n_qubits, int n_layers);
  /// Each angle drawn from N(0, scale^2).
  static VqcParams random_normal(int n_qubits, int n_layers, double scale, std::mt19937_64& rng);

  std::size_t size() const noexcept { return theta.size(); }
  double& at(int layer, int qubit, int k) { return theta[index(layer, qubit, k)]; }
  double at(int layer, int qubit, int k) const { return theta[index(layer, qubit, k)]; }
  std::span<const double> layer(int l) const;

  std::size_t index(int layer, int qubit, int k) const {
    return (static_cast<std::size_t>(layer) * n_qubits + qubit) * 2 + k;
  }
};

/// H, Rx(omega_q), Rz(omega_q) on every qubit of |0...0>.
qsim::StateVector encode(std::span<const double> omega);

/// CNOT ring q -> (q+1) mod n, then Rx(theta_q0) Rz(theta_q1) per qubit.
/// `layer_theta` holds 2 angles per qubit. A single qubit has no ring.
qsim::StateVector variational_block(qsim::StateVector state, std::span<const double> layer_theta);

/// <Z_q> for every qubit after encoding and all variational blocks.
std::vector<double> forward(std::span<const double> omega, const VqcParams& params);

struct VqcGradient {
  std::vector<double> theta;  // shaped like VqcParams::theta
  std::vector<double> omega;  // one entry per qubit
};

/// Gradient of sum_q upstream_q * <Z_q> by the two-term shift rule
/// (f(a + pi/2) - f(a - pi/2)) / 2 applied to every rotation angle.
///
/// An encoding angle drives both the Rx and the Rz of its qubit; its
/// derivative is the sum of the two shifted contributions.
VqcGradient parameter_shift_gradient(std::span<const double> omega, const VqcParams& params,
                                     std::span<const double> upstream);

/// <Z_q> for all q.
std::vector<double> expectations(const qsim::StateVector& state);

}  // namespace qspike::vqc
