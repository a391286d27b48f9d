#pragma once

#include <span>
#include <vector>

#include "cdqkl/matrix.hpp"

namespace cdqkl::svm {

// Dual-form model over a precomputed kernel: f(x) = sum_j alpha_j y_j
// K(x, x_j) + bias. alphas keeps one entry per training point (zeros
// included) so K_cross columns line up with training indices.
struct SvmModel {
  std::vector<double> alphas;
  double bias = 0.0;
  std::vector<int> labels;  // training labels
  double c = 1.0;

  std::vector<std::size_t> support_indices() const;
};

// Gram matrices. The cross variants have rows = eval points and cols =
// train points, matching decision().
Matrix linear_kernel(const Matrix& x);
Matrix linear_cross(const Matrix& x_train, const Matrix& x_eval);
Matrix gaussian_kernel(const Matrix& x, double gamma);
Matrix gaussian_cross(const Matrix& x_train, const Matrix& x_eval, double gamma);

// Sequential minimal optimization on the dual with first-order working-set
// selection. max_passes caps sweeps without progress. Slightly indefinite
// kernels get a warning and training proceeds; a single-class input returns
// the trivial all-zero model whose constant decision is that label's sign.
SvmModel smo_train(const Matrix& k, const std::vector<int>& y, double c, double tol = 1e-3,
                   int max_passes = 200);

// Per-row decision scores.
std::vector<double> decision(const SvmModel& model, const Matrix& k_cross);

// sign(score) with sign(0) -> +1.
std::vector<int> predict(const SvmModel& model, const Matrix& k_cross);

double accuracy(std::span<const int> predictions, std::span<const int> labels);

// sum alpha - 1/2 alpha^T Q alpha with Q = diag(y) K diag(y).
double dual_objective(const Matrix& k, std::span<const int> y, std::span<const double> alphas);

// Largest amount by which any KKT condition at tolerance `tol` is violated
// (0 means all satisfied). Also accounts for box and equality feasibility.
double kkt_violation(const SvmModel& model, const Matrix& k, double tol);

}  // namespace cdqkl::svm
