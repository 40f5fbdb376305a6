#include "robustnet/matrix_ops.hpp"

#include <algorithm>
#include <cmath>

#include "robustnet/errors.hpp"

namespace robustnet {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

std::pair<Vector, Matrix> eig_symmetric(const Matrix& s) {
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("eig_symmetric: matrix must be square");
    }
    const double scale = std::max(s.norm(), 1e-300);
    const double asym = (s - s.transpose()).norm();
    if (asym > 1e-10 * scale) {
        throw std::invalid_argument("eig_symmetric: matrix is not symmetric (||s - s^T|| = " +
                                    std::to_string(asym) + ")");
    }
    const Matrix sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eig_symmetric: eigensolver failed to converge");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

Spectrum eig_general(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eig_general: matrix must be square");
    }
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eig_general: QR iteration did not converge");
    }
    Spectrum values(static_cast<size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) values[static_cast<size_t>(i)] = es.eigenvalues()(i);
    std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return values;
}

bool is_positive_definite(const Matrix& s, double margin) {
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("is_positive_definite: matrix must be square");
    }
    if (margin < 0.0) {
        throw std::invalid_argument("is_positive_definite: margin must be nonnegative");
    }
    const auto [values, vectors] = eig_symmetric(s);
    (void)vectors;
    return values(0) > margin;
}

Matrix solve_linear(const Matrix& a, const Matrix& rhs) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("solve_linear: matrix must be square");
    }
    if (a.rows() != rhs.rows()) {
        throw std::invalid_argument("solve_linear: rhs row count mismatch");
    }
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    if (!std::isfinite(rcond) || rcond < 1e-12) {
        throw NumericalError("solve_linear: matrix is singular or ill-conditioned (cond estimate " +
                             std::to_string(rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity()) +
                             ")");
    }
    Matrix x = lu.solve(rhs);
    x += lu.solve(rhs - a * x);  // one refinement step
    return x;
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

double spectral_norm_upper_bound(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Vector v = Vector::Ones(m.cols());
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 40; ++it) {
        Vector w = m.transpose() * (m * v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        sigma = std::sqrt(nw);
        v = w / nw;
    }
    return 1.02 * sigma;  // small headroom, power iteration approaches from below
}

double spectral_radius(const Matrix& m) {
    double r = 0.0;
    for (const auto& v : eig_general(m)) r = std::max(r, std::abs(v));
    return r;
}

void require_finite(const Matrix& m, const char* label) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(label) + ": entries must be finite");
    }
}

}  // namespace robustnet
