#pragma once

#include <vector>

#include "cdqkl/matrix.hpp"

namespace cdqkl::linalg {

// Eigenvalues of a symmetric matrix via the cyclic Jacobi rotation method,
// returned in ascending order. Throws std::invalid_argument on non-square
// input. Input is taken by value; the matrix is destroyed in place.
std::vector<double> symmetric_eigenvalues(Matrix a);

double min_eigenvalue(const Matrix& a);

// Second-largest eigenvalue magnitude; for a doubly stochastic W this is the
// sigma2 that governs averaging contraction.
double second_largest_abs_eigenvalue(const Matrix& a);

double frobenius_inner(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);

}  // namespace cdqkl::linalg
