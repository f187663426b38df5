#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qspike::qsim {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 12;

/// Dense statevector over n qubits.
///
/// Amplitude index i encodes the basis state |i>, with qubit 0 stored in the
/// most significant bit. Gates mutate the state in place and keep it
/// normalised up to floating-point rounding.
class StateVector {
 public:
  /// |0...0> on `n_qubits` qubits. Throws ArgumentError outside [1, kMaxQubits].
  static StateVector zero(int n_qubits);

  /// Builds a state from explicit amplitudes; the length must be a power of two.
  /// The amplitudes are taken as given (no renormalisation).
  static StateVector from_amplitudes(std::vector<Amplitude> amps);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

  void apply_hadamard(int q);
  void apply_rx(int q, double omega);
  void apply_rz(int q, double omega);
  void apply_cnot(int control, int target);

  /// <Z_q> = P(q reads 0) - P(q reads 1).
  double expectation_z(int q) const;

  /// Sum of squared magnitudes.
  double norm_squared() const noexcept;

 private:
  StateVector(int n, std::vector<Amplitude> amps) : n_qubits_(n), amps_(std::move(amps)) {}

  std::size_t mask(int q) const;
  // Applies [[m00, m01], [m10, m11]] to qubit q.
  void apply_single(int q, Amplitude m00, Amplitude m01, Amplitude m10, Amplitude m11);

  int n_qubits_;
  std::vector<Amplitude> amps_;
};

// Free-function spellings of the operations, for call sites that prefer
// value semantics.
StateVector zero_state(int n_qubits);
StateVector apply_hadamard(StateVector state, int q);
StateVector apply_rx(StateVector state, int q, double omega);
StateVector apply_rz(StateVector state, int q, double omega);
StateVector apply_cnot(StateVector state, int control, int target);
double expectation_z(const StateVector& state, int q);

}  // namespace qspike::qsim
