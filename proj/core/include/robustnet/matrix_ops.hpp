#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace robustnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigenvalues sorted ascending by real part, ties broken by imaginary part.
using Spectrum = std::vector<std::complex<double>>;

// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

// Eigendecomposition of a symmetric matrix. Eigenvalues ascending, columns of
// the returned matrix are the matching orthonormal eigenvectors. Inputs that
// deviate from symmetry by more than 1e-10 * ||s|| are rejected; smaller
// deviations are symmetrized away before factoring.
std::pair<Vector, Matrix> eig_symmetric(const Matrix& s);

// Eigenvalues of a general square real matrix, sorted ascending (re, im).
Spectrum eig_general(const Matrix& m);

// True iff the smallest eigenvalue of the symmetric matrix s exceeds margin.
bool is_positive_definite(const Matrix& s, double margin = 0.0);

// Solve a * x = rhs for square nonsingular a. Rejects inputs whose condition
// estimate exceeds 1e12, reporting the estimate in the error message.
Matrix solve_linear(const Matrix& a, const Matrix& rhs);

// Largest singular value.
double spectral_norm(const Matrix& m);

// Cheap upper estimate of the spectral norm via power iteration on m^T m.
double spectral_norm_upper_bound(const Matrix& m);

// max |eigenvalue| from a general spectrum.
double spectral_radius(const Matrix& m);

// Validates that all entries are finite; throws std::invalid_argument naming
// `label` otherwise.
void require_finite(const Matrix& m, const char* label);

}  // namespace robustnet
