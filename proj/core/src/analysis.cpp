#include "robustnet/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "robustnet/errors.hpp"

namespace robustnet {

bool is_hurwitz(const Matrix& m) {
    const double scale = std::max(m.norm(), 1e-300);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& ev : eig_general(m)) worst = std::max(worst, ev.real());
    return worst < -1e-9 * scale;
}

bool is_schur(const Matrix& m) {
    return spectral_radius(m) < 1.0 - 1e-9;
}

namespace {

// sigma_max of C (i w I - A)^{-1} B + D at one frequency.
double gain_at(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D, double w) {
    const Eigen::MatrixXcd M =
        std::complex<double>(0.0, w) * Eigen::MatrixXcd::Identity(A.rows(), A.cols()) - A;
    const Eigen::MatrixXcd G = C.cast<std::complex<double>>() * M.lu().solve(B.cast<std::complex<double>>()) +
                               D.cast<std::complex<double>>();
    return G.jacobiSvd().singularValues()(0);
}

// True iff the Hamiltonian for level gamma has an eigenvalue on the imaginary
// axis, i.e. the norm is >= gamma. Requires gamma > sigma_max(D).
bool hamiltonian_crossing(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                          double gamma) {
    const Eigen::Index n = A.rows();
    const Matrix R = gamma * gamma * Matrix::Identity(D.cols(), D.cols()) - D.transpose() * D;
    Eigen::LLT<Matrix> llt(R);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("hinf_norm: bisection level fell below the feedthrough gain");
    }
    const Matrix Rinv_Bt = llt.solve(B.transpose());
    const Matrix Abar = A + B * llt.solve(D.transpose() * C);
    Matrix H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = Abar;
    H.topRightCorner(n, n) = B * Rinv_Bt;
    H.bottomLeftCorner(n, n) =
        -C.transpose() * (Matrix::Identity(C.rows(), C.rows()) + D * llt.solve(D.transpose())) * C;
    H.bottomRightCorner(n, n) = -Abar.transpose();
    const double threshold = 1e-8 * std::max(H.norm(), 1e-300);
    for (const auto& ev : eig_general(H)) {
        if (std::abs(ev.real()) <= threshold) return true;
    }
    return false;
}

}  // namespace

double hinf_norm_ct_general(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                            double tol) {
    if (!is_hurwitz(A)) {
        throw NumericalError("hinf_norm_ct: state matrix is not Hurwitz (norm is infinite)");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("hinf_norm_ct: tol must be positive");
    const double d_gain = spectral_norm(D);
    if (B.norm() == 0.0 || C.norm() == 0.0) return d_gain;

    // Lower bound from sample frequencies: dc, resonances, and a coarse sweep.
    double lo = d_gain;
    std::vector<double> freqs{0.0};
    for (const auto& ev : eig_general(A)) {
        if (std::abs(ev.imag()) > 0.0) freqs.push_back(std::abs(ev.imag()));
    }
    const double wscale = std::max(A.norm(), 1.0);
    for (int i = -4; i <= 4; ++i) freqs.push_back(wscale * std::pow(10.0, i));
    for (double w : freqs) lo = std::max(lo, gain_at(A, B, C, D, w));
    if (lo <= 1e-300) return 0.0;  // transfer function vanishes identically

    double hi = 2.0 * lo;
    int guard = 0;
    while (hamiltonian_crossing(A, B, C, D, hi)) {
        hi *= 2.0;
        if (++guard > 200) throw NumericalError("hinf_norm_ct: failed to bracket the norm");
    }
    while (hi - lo > tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (hamiltonian_crossing(A, B, C, D, mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double hinf_norm_ct(const TransferTriple& t, double tol) {
    return hinf_norm_ct_general(t.A_cl, t.B_in, t.C_out,
                                Matrix::Zero(t.C_out.rows(), t.B_in.cols()), tol);
}

double hinf_norm_dt(const TransferTriple& t, double tol) {
    if (!is_schur(t.A_cl)) {
        throw NumericalError("hinf_norm_dt: state matrix is not Schur stable (norm is infinite)");
    }
    // z = (1+s)/(1-s) carries the unit circle to the imaginary axis; the
    // Schur precondition keeps I + A invertible.
    const Eigen::Index n = t.A_cl.rows();
    const Matrix M = Matrix::Identity(n, n) + t.A_cl;
    Eigen::PartialPivLU<Matrix> lu(M);
    Eigen::PartialPivLU<Matrix> lut(M.transpose());
    const Matrix Ac = lu.solve(t.A_cl - Matrix::Identity(n, n));
    const Matrix Minv_B = lu.solve(t.B_in);
    const Matrix Bc = std::sqrt(2.0) * Minv_B;
    const Matrix Cc = std::sqrt(2.0) * lut.solve(t.C_out.transpose()).transpose();
    const Matrix Dc = -t.C_out * Minv_B;
    return hinf_norm_ct_general(Ac, Bc, Cc, Dc, tol);
}

namespace {

void check_verify_inputs(const AgentModel& model, const Network& network,
                         const Controller& controller) {
    model.validate();
    if (controller.K.rows() != model.m() || controller.K.cols() != model.n()) {
        throw std::invalid_argument("verify: gain K must be m x n");
    }
    if (!network.assumption1()) {
        throw std::invalid_argument("verify: network must satisfy the connectivity/pinning assumption");
    }
    if (model.mode == TimeDomain::Continuous && !controller.coupling_c) {
        throw std::invalid_argument("verify: continuous controller needs a coupling strength");
    }
}

}  // namespace

VerificationReport verify_stabilization(const AgentModel& model, const Network& network,
                                        const Controller& controller, double tolerance) {
    check_verify_inputs(model, network, controller);
    if (tolerance < 0.0) throw std::invalid_argument("verify: tolerance must be nonnegative");

    VerificationReport report;
    report.tolerance_used = tolerance;
    const double bound = 1.0 / model.delta;
    const Vector lambdas = model.mode == TimeDomain::Continuous
                               ? network.laplacian_eigenvalues()
                               : network.pinned_stochastic_eigenvalues();
    report.verdict = true;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        ModeCheck mc;
        mc.lambda = lambdas(i);
        mc.bound = bound;
        Matrix acl;
        if (model.mode == TimeDomain::Continuous) {
            acl = model.A + (*controller.coupling_c * mc.lambda) * model.B * controller.K;
            mc.stable = is_hurwitz(acl);
        } else {
            acl = model.A + (1.0 - mc.lambda) * model.B * controller.K;
            mc.stable = is_schur(acl);
        }
        if (mc.stable) {
            const TransferTriple triple{acl, model.D, model.E};
            mc.hinf_norm = model.mode == TimeDomain::Continuous ? hinf_norm_ct(triple)
                                                                : hinf_norm_dt(triple);
        } else {
            mc.hinf_norm = std::numeric_limits<double>::infinity();
        }
        mc.margin = bound * (1.0 + tolerance) - mc.hinf_norm;
        report.verdict = report.verdict && mc.stable && mc.margin > 0.0;
        report.modes.push_back(mc);
    }
    return report;
}

VerificationReport verify_attenuation(const AgentModel& model, const Network& network,
                                      const Controller& controller, double eps, double tolerance) {
    check_verify_inputs(model, network, controller);
    if (!model.has_disturbance() || !model.gamma) {
        throw std::invalid_argument("verify_attenuation: model needs B2, C and gamma");
    }
    if (!(eps > 0.0)) throw std::invalid_argument("verify_attenuation: eps must be positive");
    if (tolerance < 0.0) throw std::invalid_argument("verify: tolerance must be nonnegative");

    const double gamma = *model.gamma;
    const int n = model.n();
    Matrix b_in(n, model.j() + model.B2->cols());
    b_in << std::sqrt(eps) * model.delta * model.D, (1.0 / gamma) * (*model.B2);
    Matrix c_out(model.k() + model.C->rows(), n);
    c_out << (1.0 / std::sqrt(eps)) * model.E, *model.C;

    VerificationReport report;
    report.tolerance_used = tolerance;
    const Vector lambdas = model.mode == TimeDomain::Continuous
                               ? network.laplacian_eigenvalues()
                               : network.pinned_stochastic_eigenvalues();
    report.verdict = true;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        ModeCheck mc;
        mc.lambda = lambdas(i);
        mc.bound = 1.0;
        Matrix acl;
        if (model.mode == TimeDomain::Continuous) {
            acl = model.A + (*controller.coupling_c * mc.lambda) * model.B * controller.K;
            mc.stable = is_hurwitz(acl);
        } else {
            acl = model.A + (1.0 - mc.lambda) * model.B * controller.K;
            mc.stable = is_schur(acl);
        }
        if (mc.stable) {
            const TransferTriple triple{acl, b_in, c_out};
            mc.hinf_norm = model.mode == TimeDomain::Continuous ? hinf_norm_ct(triple)
                                                                : hinf_norm_dt(triple);
        } else {
            mc.hinf_norm = std::numeric_limits<double>::infinity();
        }
        mc.margin = mc.bound * (1.0 + tolerance) - mc.hinf_norm;
        report.verdict = report.verdict && mc.stable && mc.margin > 0.0;
        report.modes.push_back(mc);
    }
    return report;
}

Matrix brl_residual(const Controller& controller, const AgentModel& model, double lambda_i) {
    model.validate();
    const Matrix& cert = controller.certificate.lyapunov;
    if (cert.rows() != model.n() || cert.cols() != model.n()) {
        throw std::invalid_argument("brl_residual: certificate size mismatch");
    }
    if (!is_positive_definite(cert, 0.0)) {
        throw std::invalid_argument("brl_residual: certificate must be positive definite");
    }
    const double d2 = model.delta * model.delta;
    if (model.mode == TimeDomain::Continuous) {
        // lambda_i is the coupling-scaled eigenvalue c*lambda.
        const Matrix& P = cert;
        return model.A * P + P * model.A.transpose() - lambda_i * model.B * model.B.transpose() +
               d2 * model.D * model.D.transpose() +
               P * model.E.transpose() * model.E * P;
    }
    // Discrete: certificate is Q, the Riccati form uses P = Q^{-1}.
    const Matrix P = solve_linear(cert, Matrix::Identity(model.n(), model.n()));
    const Matrix Psym = 0.5 * (P + P.transpose());
    const Matrix ahat = model.A + (1.0 - lambda_i) * model.B * controller.K;
    const Matrix gram = Matrix::Identity(model.j(), model.j()) -
                        d2 * model.D.transpose() * Psym * model.D;
    if (!is_positive_definite(0.5 * (gram + gram.transpose()), 0.0)) {
        throw NumericalError(
            "brl_residual: I - delta^2 D^T P D is not positive definite; residual undefined");
    }
    const Matrix pd = Psym * model.D;
    const Matrix inner = solve_linear(gram, pd.transpose() * ahat);
    return ahat.transpose() * Psym * ahat - Psym + model.E.transpose() * model.E +
           d2 * ahat.transpose() * pd * inner;
}

}  // namespace robustnet
