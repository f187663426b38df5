#include "qspike/qsim.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qspike/error.hpp"

namespace qspike::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_finite_angle(double omega) {
  if (!std::isfinite(omega)) throw ArgumentError("rotation angle must be finite");
}

}  // namespace

StateVector StateVector::zero(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ArgumentError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                        std::to_string(kMaxQubits) + "]");
  }
  std::vector<Amplitude> amps(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
  amps[0] = Amplitude{1.0, 0.0};
  return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amps) {
  const std::size_t n = amps.size();
  if (n < 2 || !std::has_single_bit(n)) throw ShapeError("amplitude count must be a power of two >= 2");
  const int qubits = std::countr_zero(n);
  if (qubits > kMaxQubits) throw ArgumentError("too many qubits");
  return StateVector(qubits, std::move(amps));
}

std::size_t StateVector::mask(int q) const {
  if (q < 0 || q >= n_qubits_) {
    throw IndexError("qubit " + std::to_string(q) + " out of range for " + std::to_string(n_qubits_) +
                     "-qubit state");
  }
  return std::size_t{1} << (n_qubits_ - 1 - q);
}

void StateVector::apply_single(int q, Amplitude m00, Amplitude m01, Amplitude m10, Amplitude m11) {
  const std::size_t bit = mask(q);
  const std::size_t n = amps_.size();
  // Visit each (i, i|bit) pair once, i ranging over indices with the bit clear.
  for (std::size_t hi = 0; hi < n; hi += 2 * bit) {
    for (std::size_t i = hi; i < hi + bit; ++i) {
      const Amplitude a0 = amps_[i];
      const Amplitude a1 = amps_[i | bit];
      amps_[i] = m00 * a0 + m01 * a1;
      amps_[i | bit] = m10 * a0 + m11 * a1;
    }
  }
}

void StateVector::apply_hadamard(int q) {
  apply_single(q, {kInvSqrt2, 0}, {kInvSqrt2, 0}, {kInvSqrt2, 0}, {-kInvSqrt2, 0});
}

void StateVector::apply_rx(int q, double omega) {
  require_finite_angle(omega);
  const double c = std::cos(omega / 2);
  const double s = std::sin(omega / 2);
  apply_single(q, {c, 0}, {0, -s}, {0, -s}, {c, 0});
}

void StateVector::apply_rz(int q, double omega) {
  require_finite_angle(omega);
  const std::size_t bit = mask(q);
  const Amplitude lo = std::polar(1.0, -omega / 2);
  const Amplitude hi = std::polar(1.0, omega / 2);
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] *= (i & bit) ? hi : lo;
}

void StateVector::apply_cnot(int control, int target) {
  const std::size_t cbit = mask(control);
  const std::size_t tbit = mask(target);
  if (control == target) throw ArgumentError("CNOT control and target must differ");
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    // Swap each pair once: from the member with the target bit clear.
    if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
  }
}

double StateVector::expectation_z(int q) const {
  const std::size_t bit = mask(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    acc += (i & bit) ? -p : p;
  }
  return acc;
}

double StateVector::norm_squared() const noexcept {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return acc;
}

StateVector zero_state(int n_qubits) { return StateVector::zero(n_qubits); }

StateVector apply_hadamard(StateVector state, int q) {
  state.apply_hadamard(q);
  return state;
}

StateVector apply_rx(StateVector state, int q, double omega) {
  state.apply_rx(q, omega);
  return state;
}

StateVector apply_rz(StateVector state, int q, double omega) {
  state.apply_rz(q, omega);
  return state;
}

StateVector apply_cnot(StateVector state, int control, int target) {
  state.apply_cnot(control, target);
  return state;
}

double expectation_z(const StateVector& state, int q) { return state.expectation_z(q); }

}  // namespace qspike::qsim
