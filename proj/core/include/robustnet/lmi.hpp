#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robustnet/matrix_ops.hpp"

namespace robustnet {

enum class VarKind { Scalar, Symmetric, Rectangular };

// One decision block of an LMI problem: a scalar (optionally bounded below),
// a symmetric matrix, or a rectangular matrix.
struct VariableBlock {
    VarKind kind = VarKind::Scalar;
    std::string name;
    int rows = 1;
    int cols = 1;
    std::optional<double> lower_bound;  // scalars only

    static VariableBlock scalar(std::string name, std::optional<double> lb = std::nullopt);
    static VariableBlock symmetric(std::string name, int n);
    static VariableBlock rectangular(std::string name, int rows, int cols);

    // Scalar coordinates contributed: 1, n(n+1)/2, or rows*cols.
    int dim() const;
};

using BlockValues = std::map<std::string, Matrix>;

// Evaluates one constraint block at concrete values for every variable block.
// Must be affine in the values and produce a symmetric matrix of fixed size.
using ConstraintBuilder = std::function<Matrix(const BlockValues&)>;

// Affine symmetric-valued constraint F(x) = constant + sum_i x_i coeff[i],
// required negative definite.
struct LmiConstraint {
    std::string label;
    Matrix constant;
    std::vector<Matrix> coeff;           // one per coordinate, zero matrices allowed
    std::vector<int> active_coords;      // indices i with coeff[i] != 0
};

struct LmiProblem {
    std::vector<VariableBlock> variables;
    std::vector<LmiConstraint> constraints;
    double scale = 1.0;  // data magnitude; drives the initial point and margins

    int coord_dim() const;
    Eigen::VectorXd pack(const BlockValues& values) const;
    BlockValues unpack(const Eigen::VectorXd& x) const;
    Matrix eval(const LmiConstraint& c, const Eigen::VectorXd& x) const;
};

// Expands builders into explicit affine constraints by probing the
// half-vectorization basis (off-diagonal symmetric basis matrices carry
// paired unit entries, so the expansion is exact for affine builders).
// Scalar lower bounds are appended as 1x1 constraint rows.
LmiProblem assemble(std::vector<VariableBlock> variables,
                    const std::vector<std::pair<std::string, ConstraintBuilder>>& builders,
                    double scale = 1.0);

enum class FeasibilityStatus { Feasible, Infeasible, Indeterminate };

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::Indeterminate;
    BlockValues point;
    double margin = 0.0;        // min over constraints of -lambda_max at the point
    double phase1_value = 0.0;  // final max eigenvalue over all constraints
    int newton_steps = 0;
    std::string diagnostics;

    bool feasible() const { return status == FeasibilityStatus::Feasible; }
};

struct SolveOptions {
    double margin_req = 1e-8;     // strictness required to declare feasibility
    double margin_target = 0.0;   // early exit once this margin is reached (0 = 10x margin_req)
    int max_newton_steps = 500;
    double mu_min = 1e-12;
};

// Phase-I feasibility: minimize t subject to F_k(x) <= t I by damped Newton
// on a log-det barrier with a decreasing centering parameter. Deterministic
// for fixed inputs.
FeasibilityResult solve_feasibility(const LmiProblem& p, double tol, double margin_req);
FeasibilityResult solve_feasibility(const LmiProblem& p, const SolveOptions& options);

struct MaximizeResult {
    double value = 0.0;    // largest parameter value certified feasible
    bool unbounded = false;  // geometric expansion exceeded the cap
    double cap = 1e6;
    std::optional<double> infeasible_above;  // bracketing witness when bounded
    std::vector<std::pair<double, bool>> trace;  // (parameter, feasible) evidence
};

// Maximizes a scalar parameter subject to LMI feasibility: geometric
// expansion of the upper end until infeasible (or the cap is hit), then
// bisection to relative width tol. family(lo) must be feasible.
// Indeterminate solves count as infeasible.
MaximizeResult maximize_parameter(const std::function<LmiProblem(double)>& family, double lo,
                                  double hi_init, double tol, const SolveOptions& options = {});

}  // namespace robustnet
