#include "cdqkl/statevec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace cdqkl::statevec {

namespace {

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    throw std::out_of_range("gate qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(n) + "-qubit state");
  }
}

}  // namespace

Gate inverse(const Gate& g) {
  switch (g.kind) {
    case GateKind::H:
    case GateKind::CNOT:
      return g;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::RZZ:
      return {g.kind, g.q0, g.q1, -g.angle};
  }
  throw std::logic_error("inverse: unknown gate kind");
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::out_of_range("state capacity: n_qubits must be in [1, " +
                            std::to_string(kMaxQubits) + "], got " + std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = {1.0, 0.0};
}

void StateVector::apply_one_qubit(int q, cplx u00, cplx u01, cplx u10, cplx u11) {
  const std::size_t mask = std::size_t{1} << q;
  const std::size_t dim = amps_.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & mask) == 0) {
      const std::size_t j = i | mask;
      const cplx a0 = amps_[i];
      const cplx a1 = amps_[j];
      amps_[i] = u00 * a0 + u01 * a1;
      amps_[j] = u10 * a0 + u11 * a1;
    }
  }
}

void StateVector::apply(const Gate& g) {
  switch (g.kind) {
    case GateKind::H: {
      check_qubit(g.q0, n_qubits_);
      const double s = 1.0 / std::sqrt(2.0);
      apply_one_qubit(g.q0, {s, 0}, {s, 0}, {s, 0}, {-s, 0});
      return;
    }
    case GateKind::RX: {
      check_qubit(g.q0, n_qubits_);
      const double c = std::cos(0.5 * g.angle);
      const double s = std::sin(0.5 * g.angle);
      apply_one_qubit(g.q0, {c, 0}, {0, -s}, {0, -s}, {c, 0});
      return;
    }
    case GateKind::RY: {
      check_qubit(g.q0, n_qubits_);
      const double c = std::cos(0.5 * g.angle);
      const double s = std::sin(0.5 * g.angle);
      apply_one_qubit(g.q0, {c, 0}, {-s, 0}, {s, 0}, {c, 0});
      return;
    }
    case GateKind::RZ: {
      check_qubit(g.q0, n_qubits_);
      const cplx lo = std::polar(1.0, -0.5 * g.angle);
      const cplx hi = std::polar(1.0, +0.5 * g.angle);
      const std::size_t mask = std::size_t{1} << g.q0;
      for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] *= (i & mask) ? hi : lo;
      return;
    }
    case GateKind::RZZ: {
      check_qubit(g.q0, n_qubits_);
      check_qubit(g.q1, n_qubits_);
      if (g.q0 == g.q1) throw std::invalid_argument("RZZ: duplicate qubit index");
      const cplx even = std::polar(1.0, -0.5 * g.angle);
      const cplx odd = std::polar(1.0, +0.5 * g.angle);
      for (std::size_t i = 0; i < amps_.size(); ++i) {
        const bool parity = ((i >> g.q0) & 1) != ((i >> g.q1) & 1);
        amps_[i] *= parity ? odd : even;
      }
      return;
    }
    case GateKind::CNOT: {
      check_qubit(g.q0, n_qubits_);
      check_qubit(g.q1, n_qubits_);
      if (g.q0 == g.q1) throw std::invalid_argument("CNOT: duplicate qubit index");
      const std::size_t cm = std::size_t{1} << g.q0;
      const std::size_t tm = std::size_t{1} << g.q1;
      for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
      }
      return;
    }
  }
  throw std::logic_error("apply: unknown gate kind");
}

void StateVector::apply(std::span<const Gate> circuit) {
  for (const Gate& g : circuit) apply(g);
}

double StateVector::norm() const {
  double acc = 0.0;
  for (const cplx& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

StateVector zero_state(int n_qubits) { return StateVector(n_qubits); }

StateVector apply_gate(StateVector state, const Gate& g) {
  state.apply(g);
  return state;
}

StateVector apply_circuit(StateVector state, std::span<const Gate> circuit) {
  state.apply(circuit);
  return state;
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("inner_product: qubit count mismatch (" +
                                std::to_string(a.n_qubits()) + " vs " +
                                std::to_string(b.n_qubits()) + ")");
  }
  cplx acc{0.0, 0.0};
  const auto av = a.amplitudes();
  const auto bv = b.amplitudes();
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::conj(av[i]) * bv[i];
  return acc;
}

double prob_zero(const StateVector& s) { return std::norm(s.amplitudes()[0]); }

}  // namespace cdqkl::statevec
