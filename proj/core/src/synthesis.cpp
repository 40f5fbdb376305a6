#include "robustnet/synthesis.hpp"

#include <cmath>
#include <sstream>

#include "robustnet/errors.hpp"

namespace robustnet {

void AgentModel::validate() const {
    require_finite(A, "A");
    require_finite(B, "B");
    require_finite(D, "D");
    require_finite(E, "E");
    if (A.rows() != A.cols()) throw std::invalid_argument("AgentModel: A must be square");
    if (B.rows() != A.rows()) throw std::invalid_argument("AgentModel: B must have n rows");
    if (D.rows() != A.rows()) throw std::invalid_argument("AgentModel: D must have n rows");
    if (E.cols() != A.cols()) throw std::invalid_argument("AgentModel: E must have n columns");
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("AgentModel: delta must be positive");
    }
    if (B2.has_value() != C.has_value()) {
        throw std::invalid_argument("AgentModel: B2 and C must be supplied together");
    }
    if (gamma.has_value() != has_disturbance()) {
        throw std::invalid_argument("AgentModel: gamma is required exactly when B2 and C are present");
    }
    if (B2) {
        require_finite(*B2, "B2");
        require_finite(*C, "C");
        if (B2->rows() != A.rows()) throw std::invalid_argument("AgentModel: B2 must have n rows");
        if (C->cols() != A.cols()) throw std::invalid_argument("AgentModel: C must have n columns");
        if (!(*gamma > 0.0)) throw std::invalid_argument("AgentModel: gamma must be positive");
    }
}

double AgentModel::scale() const {
    double s = std::max({A.norm(), B.norm(), E.norm(), delta * D.norm()});
    if (B2) s = std::max({s, B2->norm() / *gamma, C->norm()});
    return std::max(s, 1e-12);
}

double coupling_threshold(double tau, double lambda_min) {
    if (!(tau > 0.0) || !(lambda_min > 0.0)) {
        throw std::invalid_argument("coupling_threshold: tau and lambda_min must be positive");
    }
    return tau / lambda_min;
}

namespace {

constexpr double kPdFloorFactor = 1e-6;     // P >= factor * scale * I
constexpr double kMarginReqFactor = 1e-8;   // required strictness, scaled by data magnitude

// P > 0 side constraint: -P + floor * I <= 0.
ConstraintBuilder pd_floor_builder(const std::string& name, int n, double floor) {
    return [name, n, floor](const BlockValues& v) -> Matrix {
        return -v.at(name) + floor * Matrix::Identity(n, n);
    };
}

FeasibilityResult run_solver(const LmiProblem& problem, const char* what) {
    SolveOptions opt;
    opt.margin_req = kMarginReqFactor * problem.scale;
    const FeasibilityResult result = solve_feasibility(problem, opt);
    if (!result.feasible()) {
        std::ostringstream msg;
        msg << what << ": LMI "
            << (result.status == FeasibilityStatus::Infeasible ? "infeasible" : "indeterminate");
        std::ostringstream diag;
        diag << "status="
             << (result.status == FeasibilityStatus::Infeasible ? "infeasible" : "indeterminate")
             << " phase1_value=" << result.phase1_value << " margin=" << result.margin
             << " newton_steps=" << result.newton_steps << " " << result.diagnostics;
        throw SynthesisError(msg.str(), diag.str());
    }
    return result;
}

Matrix gain_from_lyapunov(const Matrix& B, const Matrix& lyap) {
    // K = -1/2 B^T P^{-1} computed as a linear solve against P (symmetric).
    return -0.5 * solve_linear(lyap, B).transpose();
}

void require_assumption1(const Network& network) {
    if (!network.assumption1()) {
        throw std::invalid_argument(
            "synthesis: network must be connected with at least one pinned node");
    }
}

}  // namespace

LmiProblem stabilization_lmi_ct(const AgentModel& model, double delta) {
    const int n = model.n();
    const int j = model.j();
    const int k = model.k();
    const Matrix A = model.A, B = model.B, D = model.D, E = model.E;
    const double scale = std::max(model.scale(), delta * D.norm());
    auto main_block = [=](const BlockValues& v) -> Matrix {
        const Matrix& P = v.at("P");
        const double tau = v.at("tau")(0, 0);
        Matrix f = Matrix::Zero(n + j + k, n + j + k);
        f.topLeftCorner(n, n) = A * P + P * A.transpose() - tau * B * B.transpose();
        f.block(0, n, n, j) = delta * D;
        f.block(n, 0, j, n) = delta * D.transpose();
        f.block(0, n + j, n, k) = P * E.transpose();
        f.block(n + j, 0, k, n) = E * P;
        f.block(n, n, j, j) = -Matrix::Identity(j, j);
        f.block(n + j, n + j, k, k) = -Matrix::Identity(k, k);
        return f;
    };
    return assemble({VariableBlock::symmetric("P", n), VariableBlock::scalar("tau", 0.0)},
                    {{"riccati", main_block},
                     {"pd:P", pd_floor_builder("P", n, kPdFloorFactor * scale)}},
                    scale);
}

LmiProblem attenuation_lmi_ct(const AgentModel& model, double delta) {
    const int n = model.n();
    const int k = model.k();
    const int l = static_cast<int>(model.C->rows());
    const Matrix A = model.A, B = model.B, D = model.D, E = model.E;
    const Matrix B2 = *model.B2, C = *model.C;
    const double gamma = *model.gamma;
    const double scale = std::max(model.scale(), delta * D.norm());
    auto main_block = [=](const BlockValues& v) -> Matrix {
        const Matrix& Q = v.at("Q");
        const double tau = v.at("tau")(0, 0);
        const double eps = v.at("eps")(0, 0);
        Matrix f = Matrix::Zero(n + l + k, n + l + k);
        f.topLeftCorner(n, n) = A * Q + Q * A.transpose() - tau * B * B.transpose() +
                                (1.0 / (gamma * gamma)) * B2 * B2.transpose() +
                                eps * delta * delta * D * D.transpose();
        f.block(0, n, n, l) = Q * C.transpose();
        f.block(n, 0, l, n) = C * Q;
        f.block(0, n + l, n, k) = Q * E.transpose();
        f.block(n + l, 0, k, n) = E * Q;
        f.block(n, n, l, l) = -Matrix::Identity(l, l);
        f.block(n + l, n + l, k, k) = -eps * Matrix::Identity(k, k);
        return f;
    };
    return assemble({VariableBlock::symmetric("Q", n), VariableBlock::scalar("tau", 0.0),
                     VariableBlock::scalar("eps", 0.0)},
                    {{"riccati", main_block},
                     {"pd:Q", pd_floor_builder("Q", n, kPdFloorFactor * scale)}},
                    scale);
}

LmiProblem stabilization_lmi_dt(const AgentModel& model, double delta, double kappa) {
    const int n = model.n();
    const int m = model.m();
    const int k = model.k();
    const Matrix A = model.A, B = model.B, D = model.D, E = model.E;
    const double scale = std::max(model.scale(), delta * D.norm());
    auto main_block = [=](const BlockValues& v) -> Matrix {
        const Matrix& Q = v.at("Q");
        const Matrix& W = v.at("W");
        const double tau = v.at("tau")(0, 0);
        const Matrix aqbw = A * Q + B * W;
        Matrix f = Matrix::Zero(2 * n + k + m, 2 * n + k + m);
        f.topLeftCorner(n, n) = -Q;
        f.block(0, n, n, n) = aqbw.transpose();
        f.block(n, 0, n, n) = aqbw;
        f.block(n, n, n, n) = -Q + delta * delta * D * D.transpose() +
                              tau * kappa * kappa * B * B.transpose();
        f.block(0, 2 * n, n, k) = Q * E.transpose();
        f.block(2 * n, 0, k, n) = E * Q;
        f.block(2 * n, 2 * n, k, k) = -Matrix::Identity(k, k);
        f.block(0, 2 * n + k, n, m) = W.transpose();
        f.block(2 * n + k, 0, m, n) = W;
        f.block(2 * n + k, 2 * n + k, m, m) = -tau * Matrix::Identity(m, m);
        return f;
    };
    return assemble({VariableBlock::symmetric("Q", n), VariableBlock::rectangular("W", m, n),
                     VariableBlock::scalar("tau", 0.0)},
                    {{"riccati", main_block},
                     {"pd:Q", pd_floor_builder("Q", n, kPdFloorFactor * scale)}},
                    scale);
}

LmiProblem attenuation_lmi_dt(const AgentModel& model, double delta, double kappa) {
    const int n = model.n();
    const int m = model.m();
    const int k = model.k();
    const int l = static_cast<int>(model.C->rows());
    const Matrix A = model.A, B = model.B, D = model.D, E = model.E;
    const Matrix B2 = *model.B2, C = *model.C;
    const double gamma = *model.gamma;
    const double scale = std::max(model.scale(), delta * D.norm());
    // Second diagonal block carries the scaled-system input gram
    // eps delta^2 D D^T + gamma^-2 B2 B2^T alongside the kappa term.
    auto main_block = [=](const BlockValues& v) -> Matrix {
        const Matrix& Q = v.at("Q");
        const Matrix& W = v.at("W");
        const double tau = v.at("tau")(0, 0);
        const double eps = v.at("eps")(0, 0);
        const Matrix aqbw = A * Q + B * W;
        const int sz = 2 * n + k + l + m;
        Matrix f = Matrix::Zero(sz, sz);
        f.topLeftCorner(n, n) = -Q;
        f.block(0, n, n, n) = aqbw.transpose();
        f.block(n, 0, n, n) = aqbw;
        f.block(n, n, n, n) = -Q + eps * delta * delta * D * D.transpose() +
                              (1.0 / (gamma * gamma)) * B2 * B2.transpose() +
                              tau * kappa * kappa * B * B.transpose();
        f.block(0, 2 * n, n, k) = Q * E.transpose();
        f.block(2 * n, 0, k, n) = E * Q;
        f.block(2 * n, 2 * n, k, k) = -eps * Matrix::Identity(k, k);
        f.block(0, 2 * n + k, n, l) = Q * C.transpose();
        f.block(2 * n + k, 0, l, n) = C * Q;
        f.block(2 * n + k, 2 * n + k, l, l) = -Matrix::Identity(l, l);
        f.block(0, 2 * n + k + l, n, m) = W.transpose();
        f.block(2 * n + k + l, 0, m, n) = W;
        f.block(2 * n + k + l, 2 * n + k + l, m, m) = -tau * Matrix::Identity(m, m);
        return f;
    };
    return assemble({VariableBlock::symmetric("Q", n), VariableBlock::rectangular("W", m, n),
                     VariableBlock::scalar("tau", 0.0), VariableBlock::scalar("eps", 0.0)},
                    {{"riccati", main_block},
                     {"pd:Q", pd_floor_builder("Q", n, kPdFloorFactor * scale)}},
                    scale);
}

Controller synth_ct(const AgentModel& model, const Network& network) {
    model.validate();
    if (model.mode != TimeDomain::Continuous) {
        throw std::invalid_argument("synth_ct: model must be continuous-time");
    }
    require_assumption1(network);
    const FeasibilityResult res = run_solver(stabilization_lmi_ct(model, model.delta), "synth_ct");

    Controller ctrl;
    ctrl.certificate.lyapunov = res.point.at("P");
    ctrl.certificate.tau = res.point.at("tau")(0, 0);
    ctrl.certificate.lmi_margin = res.margin;
    ctrl.K = gain_from_lyapunov(model.B, ctrl.certificate.lyapunov);
    ctrl.coupling_c = coupling_threshold(ctrl.certificate.tau, network.lambda_min());
    ctrl.pins = network.pins;
    return ctrl;
}

Controller synth_ct_hinf(const AgentModel& model, const Network& network) {
    model.validate();
    if (model.mode != TimeDomain::Continuous) {
        throw std::invalid_argument("synth_ct_hinf: model must be continuous-time");
    }
    if (!model.has_disturbance()) {
        throw std::invalid_argument("synth_ct_hinf: model needs B2, C and gamma");
    }
    require_assumption1(network);
    const FeasibilityResult res = run_solver(attenuation_lmi_ct(model, model.delta), "synth_ct_hinf");

    Controller ctrl;
    ctrl.certificate.lyapunov = res.point.at("Q");
    ctrl.certificate.tau = res.point.at("tau")(0, 0);
    ctrl.certificate.eps = res.point.at("eps")(0, 0);
    ctrl.certificate.lmi_margin = res.margin;
    ctrl.K = gain_from_lyapunov(model.B, ctrl.certificate.lyapunov);
    ctrl.coupling_c = coupling_threshold(ctrl.certificate.tau, network.lambda_min());
    ctrl.pins = network.pins;
    return ctrl;
}

namespace {

double resolve_kappa(const Network& network, std::optional<double> kappa) {
    const double actual = network.kappa();
    if (!kappa) return actual;
    if (*kappa < actual) {
        throw std::invalid_argument("synth_dt: kappa must cover the pinned-stochastic eigenvalues (>= " +
                                    std::to_string(actual) + ")");
    }
    if (!(*kappa < 1.0)) {
        throw std::invalid_argument("synth_dt: kappa must be below 1");
    }
    return *kappa;
}

}  // namespace

Controller synth_dt(const AgentModel& model, const Network& network, std::optional<double> kappa) {
    model.validate();
    if (model.mode != TimeDomain::Discrete) {
        throw std::invalid_argument("synth_dt: model must be discrete-time");
    }
    require_assumption1(network);
    const double kap = resolve_kappa(network, kappa);
    const FeasibilityResult res =
        run_solver(stabilization_lmi_dt(model, model.delta, kap), "synth_dt");

    Controller ctrl;
    ctrl.certificate.lyapunov = res.point.at("Q");
    ctrl.certificate.tau = res.point.at("tau")(0, 0);
    ctrl.certificate.lmi_margin = res.margin;
    // K = W Q^{-1} via a solve against Q^T (= Q).
    ctrl.K = solve_linear(ctrl.certificate.lyapunov, res.point.at("W").transpose()).transpose();
    ctrl.pins = network.pins;
    return ctrl;
}

Controller synth_dt_hinf(const AgentModel& model, const Network& network,
                         std::optional<double> kappa) {
    model.validate();
    if (model.mode != TimeDomain::Discrete) {
        throw std::invalid_argument("synth_dt_hinf: model must be discrete-time");
    }
    if (!model.has_disturbance()) {
        throw std::invalid_argument("synth_dt_hinf: model needs B2, C and gamma");
    }
    require_assumption1(network);
    const double kap = resolve_kappa(network, kappa);
    const FeasibilityResult res =
        run_solver(attenuation_lmi_dt(model, model.delta, kap), "synth_dt_hinf");

    Controller ctrl;
    ctrl.certificate.lyapunov = res.point.at("Q");
    ctrl.certificate.tau = res.point.at("tau")(0, 0);
    ctrl.certificate.eps = res.point.at("eps")(0, 0);
    ctrl.certificate.lmi_margin = res.margin;
    ctrl.K = solve_linear(ctrl.certificate.lyapunov, res.point.at("W").transpose()).transpose();
    ctrl.pins = network.pins;
    return ctrl;
}

MaximizeResult max_delta(const AgentModel& model, const Network& network,
                         std::optional<double> kappa, double tol) {
    model.validate();
    require_assumption1(network);
    const bool continuous = model.mode == TimeDomain::Continuous;
    const bool disturbed = model.has_disturbance();
    const double kap = continuous ? 0.0 : resolve_kappa(network, kappa);
    const auto family = [&, kap](double delta) -> LmiProblem {
        if (continuous) {
            return disturbed ? attenuation_lmi_ct(model, delta) : stabilization_lmi_ct(model, delta);
        }
        return disturbed ? attenuation_lmi_dt(model, delta, kap)
                         : stabilization_lmi_dt(model, delta, kap);
    };
    const double lo = 1e-3 * model.scale();
    const double hi_init = std::max(model.delta, 2.0 * lo);
    return maximize_parameter(family, lo, hi_init, tol);
}

}  // namespace robustnet
