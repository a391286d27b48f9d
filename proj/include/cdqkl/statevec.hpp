#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cdqkl::statevec {

using cplx = std::complex<double>;

// Desk-scale cap: dense amplitudes at 2^20 are ~16 MiB per state.
inline constexpr int kMaxQubits = 20;

enum class GateKind { H, RX, RY, RZ, RZZ, CNOT };

// One gate of the fixed set. q1 is the second operand for two-qubit gates
// (CNOT target, RZZ partner) and -1 otherwise; angle is ignored for H/CNOT.
//
// Conventions (column vectors, qubit q = bit q of the basis index):
//   H        = (1/sqrt 2) [[1, 1], [1, -1]]
//   RX(a)    = [[cos a/2, -i sin a/2], [-i sin a/2, cos a/2]]
//   RY(a)    = [[cos a/2, -sin a/2], [sin a/2, cos a/2]]
//   RZ(a)    = diag(e^{-ia/2}, e^{+ia/2})
//   RZZ(a)   = e^{-ia/2} on even-parity basis states, e^{+ia/2} on odd
//   CNOT     = flip target where control bit is 1
struct Gate {
  GateKind kind;
  int q0;
  int q1;
  double angle;

  static Gate h(int q) { return {GateKind::H, q, -1, 0.0}; }
  static Gate rx(int q, double a) { return {GateKind::RX, q, -1, a}; }
  static Gate ry(int q, double a) { return {GateKind::RY, q, -1, a}; }
  static Gate rz(int q, double a) { return {GateKind::RZ, q, -1, a}; }
  static Gate rzz(int a, int b, double angle) { return {GateKind::RZZ, a, b, angle}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, control, target, 0.0}; }
};

// H and CNOT are involutions; rotations invert by negating the angle.
Gate inverse(const Gate& g);

class StateVector {
 public:
  // Starts in |0...0>. Throws on n_qubits outside [1, kMaxQubits].
  explicit StateVector(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  cplx amplitude(std::size_t basis_index) const { return amps_.at(basis_index); }

  void apply(const Gate& g);
  void apply(std::span<const Gate> circuit);

  double norm() const;

 private:
  void apply_one_qubit(int q, cplx u00, cplx u01, cplx u10, cplx u11);

  int n_qubits_;
  std::vector<cplx> amps_;
};

StateVector zero_state(int n_qubits);

// Value-in/value-out gate application; the in-place member form is the
// workhorse, this is the convenience wrapper.
StateVector apply_gate(StateVector state, const Gate& g);
StateVector apply_circuit(StateVector state, std::span<const Gate> circuit);

// sum_k conj(a_k) * b_k; throws on dimension mismatch.
cplx inner_product(const StateVector& a, const StateVector& b);

// |amplitude of |0...0>|^2.
double prob_zero(const StateVector& s);

}  // namespace cdqkl::statevec
