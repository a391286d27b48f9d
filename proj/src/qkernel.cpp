#include "cdqkl/qkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cdqkl/linalg.hpp"
#include "cdqkl/rng.hpp"

namespace cdqkl::qkernel {

using statevec::Gate;
using statevec::StateVector;

namespace {

constexpr double kPi = std::numbers::pi;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<StateVector> encode_rows(const AnsatzSpec& spec, const Matrix& x,
                                     std::span<const double> theta) {
  std::vector<StateVector> states;
  states.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) states.push_back(encode(spec, x.row(r), theta));
  return states;
}

double overlap_sq(const StateVector& a, const StateVector& b) {
  return std::norm(statevec::inner_product(a, b));
}

// dA/dK for A = <K,K*> / (||K|| ||K*||); the loss is -A.
Matrix alignment_weights(const Matrix& k, const Matrix& k_star) {
  const double s = linalg::frobenius_inner(k, k_star);
  const double nk = linalg::frobenius_norm(k);
  const double nks = linalg::frobenius_norm(k_star);
  if (nk == 0.0 || nks == 0.0) {
    throw std::invalid_argument("alignment gradient: zero-norm kernel");
  }
  Matrix w(k.rows(), k.cols());
  const double inv = 1.0 / (nk * nks);
  const double curv = s / (nk * nk * nk * nks);
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (std::size_t j = 0; j < k.cols(); ++j) {
      w(i, j) = k_star(i, j) * inv - curv * k(i, j);
    }
  }
  return w;
}

Matrix gram_from_states(const std::vector<StateVector>& states) {
  const std::size_t m = states.size();
  Matrix k(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = clamp01(overlap_sq(states[i], states[j]));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace

AnsatzSpec AnsatzSpec::make(int n_qubits, int n_layers, int feature_dim) {
  AnsatzSpec spec;
  spec.n_qubits = n_qubits;
  spec.n_layers = n_layers;
  spec.feature_dim = feature_dim;
  for (int q = 0; q + 1 < n_qubits; ++q) spec.entangle_pairs.emplace_back(q, q + 1);
  spec.validate();
  return spec;
}

void AnsatzSpec::validate() const {
  if (n_qubits < 1 || n_qubits > statevec::kMaxQubits) {
    throw std::invalid_argument("ansatz: n_qubits must be in [1, " +
                                std::to_string(statevec::kMaxQubits) + "]");
  }
  if (n_layers < 1) throw std::invalid_argument("ansatz: n_layers must be >= 1");
  if (feature_dim < 1) throw std::invalid_argument("ansatz: feature_dim must be >= 1");
  for (const auto& [a, b] : entangle_pairs) {
    if (a == b) throw std::invalid_argument("ansatz: entangle pair with duplicate qubit");
    if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits) {
      throw std::invalid_argument("ansatz: entangle pair index out of range");
    }
  }
}

std::vector<Gate> feature_map_circuit(const AnsatzSpec& spec, std::span<const double> x,
                                      std::span<const double> theta) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.feature_dim) {
    throw std::invalid_argument("feature_map_circuit: feature vector has " +
                                std::to_string(x.size()) + " entries, spec expects " +
                                std::to_string(spec.feature_dim));
  }
  if (static_cast<int>(theta.size()) != spec.n_params()) {
    throw std::invalid_argument("feature_map_circuit: theta has " + std::to_string(theta.size()) +
                                " entries, spec expects " + std::to_string(spec.n_params()));
  }

  const int n = spec.n_qubits;
  std::vector<double> qubit_sum(n, 0.0);
  for (int j = 0; j < spec.feature_dim; ++j) qubit_sum[j % n] += x[j];

  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(spec.n_layers) *
                (2 * n + spec.feature_dim + spec.entangle_pairs.size() + (n > 1 ? n - 1 : 0)));
  for (int layer = 0; layer < spec.n_layers; ++layer) {
    for (int q = 0; q < n; ++q) gates.push_back(Gate::h(q));
    for (int j = 0; j < spec.feature_dim; ++j) gates.push_back(Gate::rz(j % n, x[j]));
    for (const auto& [a, b] : spec.entangle_pairs) {
      gates.push_back(Gate::rzz(a, b, (kPi - qubit_sum[a]) * (kPi - qubit_sum[b])));
    }
    for (int q = 0; q < n; ++q) gates.push_back(Gate::ry(q, theta[layer * n + q]));
    for (int q = 0; q + 1 < n; ++q) gates.push_back(Gate::cnot(q, q + 1));
  }
  return gates;
}

StateVector encode(const AnsatzSpec& spec, std::span<const double> x,
                   std::span<const double> theta) {
  StateVector state = statevec::zero_state(spec.n_qubits);
  state.apply(feature_map_circuit(spec, x, theta));
  return state;
}

double kernel_entry(const AnsatzSpec& spec, std::span<const double> xi, std::span<const double> xj,
                    std::span<const double> theta) {
  return clamp01(overlap_sq(encode(spec, xi, theta), encode(spec, xj, theta)));
}

double kernel_entry_inversion(const AnsatzSpec& spec, std::span<const double> xi,
                              std::span<const double> xj, std::span<const double> theta) {
  StateVector state = statevec::zero_state(spec.n_qubits);
  state.apply(feature_map_circuit(spec, xj, theta));
  const auto forward = feature_map_circuit(spec, xi, theta);
  for (auto it = forward.rbegin(); it != forward.rend(); ++it) state.apply(statevec::inverse(*it));
  return clamp01(statevec::prob_zero(state));
}

Matrix kernel_matrix(const AnsatzSpec& spec, const Matrix& x, std::span<const double> theta) {
  if (x.rows() == 0) throw std::invalid_argument("kernel_matrix: empty feature matrix");
  return gram_from_states(encode_rows(spec, x, theta));
}

Matrix cross_kernel(const AnsatzSpec& spec, const Matrix& x_train, const Matrix& x_test,
                    std::span<const double> theta) {
  if (x_train.cols() != x_test.cols()) {
    throw std::invalid_argument("cross_kernel: feature_dim mismatch between train and test");
  }
  const auto train_states = encode_rows(spec, x_train, theta);
  const auto test_states = encode_rows(spec, x_test, theta);
  Matrix k(test_states.size(), train_states.size());
  for (std::size_t r = 0; r < test_states.size(); ++r) {
    for (std::size_t c = 0; c < train_states.size(); ++c) {
      k(r, c) = clamp01(overlap_sq(test_states[r], train_states[c]));
    }
  }
  return k;
}

Matrix target_kernel(std::span<const int> labels) {
  for (int y : labels) {
    if (y != -1 && y != 1) {
      throw std::invalid_argument("target_kernel: label " + std::to_string(y) +
                                  " is not -1 or +1");
    }
  }
  Matrix k(labels.size(), labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      k(i, j) = static_cast<double>(labels[i] * labels[j]);
    }
  }
  return k;
}

double alignment(const Matrix& k, const Matrix& k_star) {
  if (k.rows() != k_star.rows() || k.cols() != k_star.cols()) {
    throw std::invalid_argument("alignment: shape mismatch");
  }
  const double nk = linalg::frobenius_norm(k);
  const double nks = linalg::frobenius_norm(k_star);
  if (nk == 0.0 || nks == 0.0) throw std::invalid_argument("alignment: zero-norm input");
  return linalg::frobenius_inner(k, k_star) / (nk * nks);
}

double local_loss(const AnsatzSpec& spec, const LabeledDataset& shard,
                  std::span<const double> theta) {
  shard.validate();
  if (shard.size() == 0) throw std::invalid_argument("local_loss: empty shard");
  return -alignment(kernel_matrix(spec, shard.features, theta), target_kernel(shard.labels));
}

ThetaVector grad_fd(const AnsatzSpec& spec, const LabeledDataset& shard,
                    std::span<const double> theta, double step) {
  if (step <= 0.0) throw std::invalid_argument("grad_fd: step must be positive");
  const int p = spec.n_params();
  if (static_cast<int>(theta.size()) != p) throw std::invalid_argument("grad_fd: theta size");
  ThetaVector probe(theta.begin(), theta.end());
  ThetaVector grad(p, 0.0);
  for (int i = 0; i < p; ++i) {
    probe[i] = theta[i] + step;
    const double up = local_loss(spec, shard, probe);
    probe[i] = theta[i] - step;
    const double down = local_loss(spec, shard, probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

ThetaVector grad_param_shift(const AnsatzSpec& spec, const LabeledDataset& shard,
                             std::span<const double> theta) {
  shard.validate();
  if (shard.size() == 0) throw std::invalid_argument("grad_param_shift: empty shard");
  const int p = spec.n_params();
  if (static_cast<int>(theta.size()) != p) {
    throw std::invalid_argument("grad_param_shift: theta size");
  }
  const std::size_t m = shard.size();

  const auto base = encode_rows(spec, shard.features, theta);
  const Matrix k = gram_from_states(base);
  const Matrix weights = alignment_weights(k, target_kernel(shard.labels));

  // dK_ij/dtheta_p = D_ij + D_ji with D_ij the ket-side shift term; the
  // bra-side term for (i, j) equals the ket-side term for (j, i) because
  // |<a|b>| = |<b|a>|. The two shifted evaluations per occurrence are the
  // four kernel evaluations of the shift rule.
  ThetaVector shifted(theta.begin(), theta.end());
  ThetaVector grad(p, 0.0);
  for (int t = 0; t < p; ++t) {
    shifted[t] = theta[t] + 0.5 * kPi;
    const auto plus = encode_rows(spec, shard.features, shifted);
    shifted[t] = theta[t] - 0.5 * kPi;
    const auto minus = encode_rows(spec, shard.features, shifted);
    shifted[t] = theta[t];

    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double d =
            0.5 * (overlap_sq(base[i], plus[j]) - overlap_sq(base[i], minus[j]));
        acc += weights(i, j) * d;
      }
    }
    // loss = -A; each D enters through both its (i,j) and (j,i) weights.
    grad[t] = -2.0 * acc;
  }
  return grad;
}

ThetaVector grad_stochastic(const AnsatzSpec& spec, const LabeledDataset& shard,
                            std::span<const double> theta, int q, std::uint64_t rng_seed) {
  if (q < 1 || static_cast<std::size_t>(q) > shard.size()) {
    throw std::invalid_argument("grad_stochastic: q must be in [1, shard size]");
  }
  auto gen = rng::make_rng(rng_seed);
  const auto idx = rng::sample_without_replacement(shard.size(), static_cast<std::size_t>(q), gen);
  return grad_param_shift(spec, shard.subset(idx), theta);
}

ThetaVector descend_alignment(const AnsatzSpec& spec, const LabeledDataset& shard,
                              ThetaVector theta, double eta, int iterations) {
  for (int k = 0; k < iterations; ++k) {
    const ThetaVector g = grad_param_shift(spec, shard, theta);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= eta * g[i];
  }
  return theta;
}

KernelMatrixCheck check_kernel_matrix(const Matrix& k) {
  if (k.rows() != k.cols() || k.rows() == 0) {
    throw std::invalid_argument("check_kernel_matrix: matrix must be square and non-empty");
  }
  KernelMatrixCheck out;
  for (std::size_t i = 0; i < k.rows(); ++i) {
    out.max_diag_deviation = std::max(out.max_diag_deviation, std::abs(k(i, i) - 1.0));
    for (std::size_t j = i + 1; j < k.cols(); ++j) {
      out.max_asymmetry = std::max(out.max_asymmetry, std::abs(k(i, j) - k(j, i)));
    }
  }
  out.min_eigenvalue = linalg::min_eigenvalue(k);
  return out;
}

}  // namespace cdqkl::qkernel
