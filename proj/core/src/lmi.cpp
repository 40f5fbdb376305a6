#include "robustnet/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robustnet/errors.hpp"

namespace robustnet {

VariableBlock VariableBlock::scalar(std::string name, std::optional<double> lb) {
    VariableBlock v;
    v.kind = VarKind::Scalar;
    v.name = std::move(name);
    v.lower_bound = lb;
    return v;
}

VariableBlock VariableBlock::symmetric(std::string name, int n) {
    if (n <= 0) throw std::invalid_argument("VariableBlock: size must be positive");
    VariableBlock v;
    v.kind = VarKind::Symmetric;
    v.name = std::move(name);
    v.rows = v.cols = n;
    return v;
}

VariableBlock VariableBlock::rectangular(std::string name, int rows, int cols) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("VariableBlock: size must be positive");
    VariableBlock v;
    v.kind = VarKind::Rectangular;
    v.name = std::move(name);
    v.rows = rows;
    v.cols = cols;
    return v;
}

int VariableBlock::dim() const {
    switch (kind) {
        case VarKind::Scalar: return 1;
        case VarKind::Symmetric: return rows * (rows + 1) / 2;
        case VarKind::Rectangular: return rows * cols;
    }
    return 0;
}

int LmiProblem::coord_dim() const {
    int d = 0;
    for (const auto& v : variables) d += v.dim();
    return d;
}

Eigen::VectorXd LmiProblem::pack(const BlockValues& values) const {
    Eigen::VectorXd x(coord_dim());
    int at = 0;
    for (const auto& v : variables) {
        const auto it = values.find(v.name);
        if (it == values.end()) throw std::invalid_argument("pack: missing block " + v.name);
        const Matrix& m = it->second;
        if (m.rows() != v.rows || m.cols() != v.cols) {
            throw std::invalid_argument("pack: block " + v.name + " has wrong size");
        }
        switch (v.kind) {
            case VarKind::Scalar: x(at++) = m(0, 0); break;
            case VarKind::Symmetric:
                for (int i = 0; i < v.rows; ++i)
                    for (int j = i; j < v.cols; ++j) x(at++) = 0.5 * (m(i, j) + m(j, i));
                break;
            case VarKind::Rectangular:
                for (int i = 0; i < v.rows; ++i)
                    for (int j = 0; j < v.cols; ++j) x(at++) = m(i, j);
                break;
        }
    }
    return x;
}

BlockValues LmiProblem::unpack(const Eigen::VectorXd& x) const {
    if (x.size() != coord_dim()) throw std::invalid_argument("unpack: wrong coordinate count");
    BlockValues out;
    int at = 0;
    for (const auto& v : variables) {
        Matrix m = Matrix::Zero(v.rows, v.cols);
        switch (v.kind) {
            case VarKind::Scalar: m(0, 0) = x(at++); break;
            case VarKind::Symmetric:
                for (int i = 0; i < v.rows; ++i)
                    for (int j = i; j < v.cols; ++j) {
                        m(i, j) = x(at);
                        m(j, i) = x(at);
                        ++at;
                    }
                break;
            case VarKind::Rectangular:
                for (int i = 0; i < v.rows; ++i)
                    for (int j = 0; j < v.cols; ++j) m(i, j) = x(at++);
                break;
        }
        out.emplace(v.name, std::move(m));
    }
    return out;
}

Matrix LmiProblem::eval(const LmiConstraint& c, const Eigen::VectorXd& x) const {
    Matrix f = c.constant;
    for (int i : c.active_coords) f += x(i) * c.coeff[static_cast<size_t>(i)];
    return f;
}

namespace {

BlockValues zero_values(const std::vector<VariableBlock>& vars) {
    BlockValues out;
    for (const auto& v : vars) out.emplace(v.name, Matrix::Zero(v.rows, v.cols));
    return out;
}

// Basis element for coordinate `offset` within block v (vech basis for
// symmetric blocks: unit diagonal entries, paired unit off-diagonal entries).
Matrix basis_element(const VariableBlock& v, int offset) {
    Matrix m = Matrix::Zero(v.rows, v.cols);
    switch (v.kind) {
        case VarKind::Scalar: m(0, 0) = 1.0; break;
        case VarKind::Symmetric: {
            int at = 0;
            for (int i = 0; i < v.rows; ++i)
                for (int j = i; j < v.cols; ++j) {
                    if (at == offset) {
                        m(i, j) = 1.0;
                        m(j, i) = 1.0;
                    }
                    ++at;
                }
            break;
        }
        case VarKind::Rectangular: {
            m(offset / v.cols, offset % v.cols) = 1.0;
            break;
        }
    }
    return m;
}

Matrix checked_symmetric(const Matrix& m, const std::string& label, Eigen::Index expected) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("assemble: constraint " + label + " is not square");
    }
    if (expected >= 0 && m.rows() != expected) {
        throw std::invalid_argument("assemble: constraint " + label + " changed size between probes");
    }
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw std::invalid_argument("assemble: constraint " + label + " is not symmetric");
    }
    return 0.5 * (m + m.transpose());
}

}  // namespace

LmiProblem assemble(std::vector<VariableBlock> variables,
                    const std::vector<std::pair<std::string, ConstraintBuilder>>& builders,
                    double scale) {
    for (size_t i = 0; i < variables.size(); ++i) {
        for (size_t j = i + 1; j < variables.size(); ++j) {
            if (variables[i].name == variables[j].name) {
                throw std::invalid_argument("assemble: duplicate variable name " + variables[i].name);
            }
        }
    }
    LmiProblem p;
    p.variables = std::move(variables);
    p.scale = scale;
    const int d = p.coord_dim();

    for (const auto& [label, builder] : builders) {
        LmiConstraint c;
        c.label = label;
        const BlockValues zeros = zero_values(p.variables);
        c.constant = checked_symmetric(builder(zeros), label, -1);
        c.coeff.resize(static_cast<size_t>(d));
        int coord = 0;
        for (const auto& v : p.variables) {
            for (int off = 0; off < v.dim(); ++off, ++coord) {
                BlockValues probe = zeros;
                probe[v.name] = basis_element(v, off);
                Matrix f = checked_symmetric(builder(probe), label, c.constant.rows());
                f -= c.constant;
                c.coeff[static_cast<size_t>(coord)] = f;
                if (f.cwiseAbs().maxCoeff() > 0.0) c.active_coords.push_back(coord);
            }
        }
        // Affinity spot-check at a deterministic mixed probe.
        {
            Eigen::VectorXd xp(d);
            for (int i = 0; i < d; ++i) xp(i) = (i % 3 == 0) ? 0.375 : (i % 3 == 1 ? -0.6875 : 1.25);
            BlockValues probe = p.unpack(xp);
            const Matrix direct = checked_symmetric(builder(probe), label, c.constant.rows());
            const Matrix expanded = p.eval(c, xp);
            const double ref = std::max({direct.cwiseAbs().maxCoeff(), expanded.cwiseAbs().maxCoeff(), 1.0});
            if ((direct - expanded).cwiseAbs().maxCoeff() > 1e-8 * ref) {
                throw std::invalid_argument("assemble: constraint " + label + " is not affine");
            }
        }
        p.constraints.push_back(std::move(c));
    }

    // Scalar lower bounds as 1x1 rows: lb - v < 0.
    int coord = 0;
    for (const auto& v : p.variables) {
        if (v.kind == VarKind::Scalar && v.lower_bound) {
            LmiConstraint c;
            c.label = "bound:" + v.name;
            c.constant = Matrix::Constant(1, 1, *v.lower_bound);
            c.coeff.assign(static_cast<size_t>(d), Matrix::Zero(1, 1));
            c.coeff[static_cast<size_t>(coord)] = Matrix::Constant(1, 1, -1.0);
            c.active_coords.push_back(coord);
            p.constraints.push_back(std::move(c));
        }
        coord += v.dim();
    }
    if (p.constraints.empty()) throw std::invalid_argument("assemble: no constraints");
    return p;
}

namespace {

double lambda_max_sym(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().maxCoeff();
}

struct NormalizedConstraint {
    Matrix constant;               // C_k / c_k
    std::vector<Matrix> coeff;     // s * A_{k,i} / c_k, active coordinates only
    std::vector<int> coords;       // matching coordinate indices
    double data_scale = 1.0;       // c_k
    Eigen::Index size = 0;
};

}  // namespace

FeasibilityResult solve_feasibility(const LmiProblem& p, double tol, double margin_req) {
    SolveOptions opt;
    opt.margin_req = margin_req;
    opt.mu_min = std::clamp(tol, 1e-14, 1e-9);
    return solve_feasibility(p, opt);
}

FeasibilityResult solve_feasibility(const LmiProblem& p, const SolveOptions& options) {
    if (!(options.margin_req > 0.0)) {
        throw std::invalid_argument("solve_feasibility: margin_req must be positive");
    }
    const int d = p.coord_dim();
    const double s = std::max(p.scale, 1e-12);
    const double margin_target =
        options.margin_target > 0.0 ? options.margin_target
                                    : std::max(10.0 * options.margin_req, 1e-3 * s);

    // Internal normalization: coordinates y with x = s*y, each constraint
    // divided by its data magnitude. Classification below always uses the
    // original-unit value act(x) = max_k lambda_max(F_k(x)).
    std::vector<NormalizedConstraint> cons;
    cons.reserve(p.constraints.size());
    for (const auto& c : p.constraints) {
        NormalizedConstraint nc;
        double ck = c.constant.cwiseAbs().maxCoeff();
        for (int i : c.active_coords) {
            ck = std::max(ck, s * c.coeff[static_cast<size_t>(i)].cwiseAbs().maxCoeff());
        }
        nc.data_scale = std::max(ck, 1e-300);
        nc.constant = c.constant / nc.data_scale;
        nc.size = c.constant.rows();
        for (int i : c.active_coords) {
            nc.coords.push_back(i);
            nc.coeff.push_back(s * c.coeff[static_cast<size_t>(i)] / nc.data_scale);
        }
        cons.push_back(std::move(nc));
    }

    const auto eval_normalized = [&](const NormalizedConstraint& nc, const Eigen::VectorXd& y) {
        Matrix f = nc.constant;
        for (size_t i = 0; i < nc.coords.size(); ++i) f += y(nc.coords[i]) * nc.coeff[i];
        return f;
    };
    const auto act_original = [&](const Eigen::VectorXd& y) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& nc : cons) {
            worst = std::max(worst, nc.data_scale * lambda_max_sym(eval_normalized(nc, y)));
        }
        return worst;
    };

    // Initial point: matrix blocks = s I (identity in y coordinates),
    // scalars = s, rectangular blocks = s on the main diagonal.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
    {
        int at = 0;
        for (const auto& v : p.variables) {
            switch (v.kind) {
                case VarKind::Scalar: y(at) = 1.0; break;
                case VarKind::Symmetric: {
                    int off = at;
                    for (int i = 0; i < v.rows; ++i) {
                        y(off) = 1.0;
                        off += v.rows - i;
                    }
                    break;
                }
                case VarKind::Rectangular:
                    for (int i = 0; i < std::min(v.rows, v.cols); ++i) y(at + i * v.cols + i) = 1.0;
                    break;
            }
            at += v.dim();
        }
    }

    double t = 0.0;
    for (const auto& nc : cons) t = std::max(t, lambda_max_sym(eval_normalized(nc, y)));
    t += 1.0;

    FeasibilityResult result;
    int total_steps = 0;
    std::ostringstream diag;

    const auto barrier_value = [&](const Eigen::VectorXd& yy, double tt, double mu,
                                   bool& interior) -> double {
        interior = true;
        double val = tt;
        for (const auto& nc : cons) {
            Matrix sk = tt * Matrix::Identity(nc.size, nc.size) - eval_normalized(nc, yy);
            Eigen::LLT<Matrix> llt(sk);
            if (llt.info() != Eigen::Success) {
                interior = false;
                return std::numeric_limits<double>::infinity();
            }
            double logdet = 0.0;
            for (Eigen::Index i = 0; i < nc.size; ++i) logdet += std::log(llt.matrixL()(i, i));
            val -= mu * 2.0 * logdet;
        }
        return val;
    };

    // A point with margin above margin_req certifies feasibility by itself;
    // an infeasibility verdict additionally needs the barrier to have
    // converged (mu driven to mu_min or the early-exit margin reached).
    const auto finish = [&](bool converged, const std::string& note) {
        const double act = act_original(y);
        result.phase1_value = act;
        result.margin = -act;
        result.point = p.unpack(s * y);
        result.newton_steps = total_steps;
        if (!note.empty()) diag << note << "; ";
        if (act < -options.margin_req) {
            result.status = FeasibilityStatus::Feasible;
        } else if (converged && act >= 0.0) {
            result.status = FeasibilityStatus::Infeasible;
        } else {
            result.status = FeasibilityStatus::Indeterminate;
            diag << "final margin " << -act << " vs required " << options.margin_req << "; ";
        }
        result.diagnostics = diag.str();
        return result;
    };

    for (double mu = 1.0; mu >= options.mu_min; mu /= 10.0) {
        for (int inner = 0; inner < 40; ++inner) {
            if (total_steps >= options.max_newton_steps) {
                return finish(false, "newton iteration cap reached");
            }
            // Gradient and Hessian of t - mu * sum_k logdet(tI - F_k(y)).
            Eigen::VectorXd grad = Eigen::VectorXd::Zero(d + 1);
            Matrix hess = Matrix::Zero(d + 1, d + 1);
            grad(d) = 1.0;
            bool interior_ok = true;
            for (const auto& nc : cons) {
                Matrix sk = t * Matrix::Identity(nc.size, nc.size) - eval_normalized(nc, y);
                Eigen::LLT<Matrix> llt(sk);
                if (llt.info() != Eigen::Success) {
                    interior_ok = false;
                    break;
                }
                const Matrix sinv = llt.solve(Matrix::Identity(nc.size, nc.size));
                std::vector<Matrix> m(nc.coords.size());
                for (size_t i = 0; i < nc.coords.size(); ++i) m[i] = sinv * nc.coeff[i];
                for (size_t i = 0; i < nc.coords.size(); ++i) {
                    grad(nc.coords[i]) += mu * m[i].trace();
                    hess(nc.coords[i], d) -= mu * (sinv * m[i]).trace();
                }
                grad(d) -= mu * sinv.trace();
                hess(d, d) += mu * (sinv * sinv).trace();
                for (size_t i = 0; i < nc.coords.size(); ++i) {
                    for (size_t j = i; j < nc.coords.size(); ++j) {
                        const double hij = mu * (m[i].array() * m[j].transpose().array()).sum();
                        hess(nc.coords[i], nc.coords[j]) += hij;
                        if (i != j) hess(nc.coords[j], nc.coords[i]) += hij;
                    }
                }
            }
            if (!interior_ok) {
                return finish(false, "barrier lost interior point");
            }
            for (int i = 0; i < d; ++i) hess(d, i) = hess(i, d);

            const double reg = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
            hess.diagonal().array() += reg;
            Eigen::LDLT<Matrix> ldlt(hess);
            Eigen::VectorXd step = ldlt.solve(-grad);
            if (!step.allFinite()) {
                return finish(false, "newton system solve failed");
            }
            const double decrement2 = -grad.dot(step);
            // Relative trust region (long steps are needed along flat
            // directions such as growing tau with delta^2).
            const double radius = 100.0 * (1.0 + y.norm() + std::abs(t));
            if (step.norm() > radius) step *= radius / step.norm();

            bool dummy = false;
            const double f0 = barrier_value(y, t, mu, dummy);
            double alpha = 1.0;
            bool accepted = false;
            while (alpha >= 1e-14) {
                const Eigen::VectorXd yn = y + alpha * step.head(d);
                const double tn = t + alpha * step(d);
                bool interior = false;
                const double fn = barrier_value(yn, tn, mu, interior);
                if (interior && fn <= f0 + 1e-4 * alpha * grad.dot(step)) {
                    y = yn;
                    t = tn;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            ++total_steps;
            if (!accepted) break;  // stage stalled; tighten mu
            if (y.cwiseAbs().maxCoeff() > 1e10) {
                return finish(false, "unbounded variable drift");
            }
            if (decrement2 * 0.5 <= 1e-10 * std::max(1.0, std::abs(t))) break;
        }
        if (act_original(y) <= -margin_target) break;  // comfortably strict already
    }
    return finish(true, "");
}

MaximizeResult maximize_parameter(const std::function<LmiProblem(double)>& family, double lo,
                                  double hi_init, double tol, const SolveOptions& options) {
    if (!(lo > 0.0) || !(hi_init > lo) || !(tol > 0.0)) {
        throw std::invalid_argument("maximize_parameter: need 0 < lo < hi_init and tol > 0");
    }
    MaximizeResult out;
    const auto feasible_at = [&](double v) {
        SolveOptions opt = options;
        LmiProblem prob = family(v);
        if (opt.margin_req <= 0.0) opt.margin_req = 1e-8 * std::max(prob.scale, 1e-12);
        const bool ok = solve_feasibility(prob, opt).feasible();
        out.trace.emplace_back(v, ok);
        return ok;
    };

    if (!feasible_at(lo)) {
        throw std::invalid_argument("maximize_parameter: family infeasible at the lower end");
    }
    double hi = hi_init;
    while (feasible_at(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > out.cap) {
            out.value = lo;
            out.unbounded = true;
            return out;
        }
    }
    while (hi - lo > tol * std::max(std::abs(hi), 1e-12)) {
        const double mid = 0.5 * (lo + hi);
        if (feasible_at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.value = lo;
    out.infeasible_above = hi;
    return out;
}

}  // namespace robustnet
