#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cdqkl/dataset.hpp"
#include "cdqkl/matrix.hpp"
#include "cdqkl/statevec.hpp"

namespace cdqkl::qkernel {

// Layered data-encoding + trainable feature map. Each layer applies, in
// order: H on every qubit; RZ(x_j) on qubit (j mod n) per feature in index
// order; RZZ on every entangle pair (a,b) with angle (pi - xbar_a)(pi -
// xbar_b), xbar_q being the sum of features assigned to qubit q; one
// trainable RY per qubit; and a CNOT chain 0->1->...->n-1.
struct AnsatzSpec {
  int n_qubits = 0;
  int n_layers = 2;
  int feature_dim = 0;
  std::vector<std::pair<int, int>> entangle_pairs;

  // Chain entangle pairs (0,1),(1,2),...,(n-2,n-1).
  static AnsatzSpec make(int n_qubits, int n_layers, int feature_dim);

  int n_params() const { return n_layers * n_qubits; }
  void validate() const;
};

// Trainable angles, row-major (layer, qubit).
using ThetaVector = std::vector<double>;

std::vector<statevec::Gate> feature_map_circuit(const AnsatzSpec& spec, std::span<const double> x,
                                                std::span<const double> theta);

// U(x; theta) |0...0>.
statevec::StateVector encode(const AnsatzSpec& spec, std::span<const double> x,
                             std::span<const double> theta);

// Fidelity |<psi(x_i)|psi(x_j)>|^2, overlap form.
double kernel_entry(const AnsatzSpec& spec, std::span<const double> xi, std::span<const double> xj,
                    std::span<const double> theta);

// Same quantity via the inverted circuit: apply U(x_j), then the exact
// inverse gate sequence of U(x_i), and read the |0...0> probability. The two
// forms agree within 1e-10 and are cross-checked in the test suite.
double kernel_entry_inversion(const AnsatzSpec& spec, std::span<const double> xi,
                              std::span<const double> xj, std::span<const double> theta);

// Gram matrix of the rows of X; symmetric, unit diagonal, PSD up to fp.
Matrix kernel_matrix(const AnsatzSpec& spec, const Matrix& x, std::span<const double> theta);

// rows = test points, cols = train points.
Matrix cross_kernel(const AnsatzSpec& spec, const Matrix& x_train, const Matrix& x_test,
                    std::span<const double> theta);

// Ideal kernel y y^T.
Matrix target_kernel(std::span<const int> labels);

// <K, K*>_F / (||K||_F ||K*||_F). Throws on size mismatch or zero norm.
double alignment(const Matrix& k, const Matrix& k_star);

// -alignment(kernel_matrix(shard), y y^T).
double local_loss(const AnsatzSpec& spec, const LabeledDataset& shard,
                  std::span<const double> theta);

// Central finite differences of local_loss, component-wise step h.
ThetaVector grad_fd(const AnsatzSpec& spec, const LabeledDataset& shard,
                    std::span<const double> theta, double step = 1e-5);

// Exact gradient via the two-eigenvalue parameter-shift rule applied to both
// occurrences of each angle in U^dag(x_i) U(x_j), chained analytically
// through the alignment quotient.
ThetaVector grad_param_shift(const AnsatzSpec& spec, const LabeledDataset& shard,
                             std::span<const double> theta);

// grad_param_shift over a uniformly sampled (without replacement, seeded)
// subset of q shard points.
ThetaVector grad_stochastic(const AnsatzSpec& spec, const LabeledDataset& shard,
                            std::span<const double> theta, int q, std::uint64_t rng_seed);

// Plain gradient descent on local_loss; returns the final theta.
ThetaVector descend_alignment(const AnsatzSpec& spec, const LabeledDataset& shard,
                              ThetaVector theta, double eta, int iterations);

struct KernelMatrixCheck {
  double max_asymmetry = 0.0;
  double max_diag_deviation = 0.0;
  double min_eigenvalue = 0.0;

  bool ok() const {
    return max_asymmetry <= 1e-10 && max_diag_deviation <= 1e-10 && min_eigenvalue >= -1e-9;
  }
};

KernelMatrixCheck check_kernel_matrix(const Matrix& k);

}  // namespace cdqkl::qkernel
