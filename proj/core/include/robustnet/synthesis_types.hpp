#pragma once

#include <optional>

#include "robustnet/graph.hpp"
#include "robustnet/matrix_ops.hpp"

namespace robustnet {

enum class TimeDomain { Continuous, Discrete };

// Per-agent plant: nominal (A, B) with norm-bounded uncertainty D F E,
// ||F|| <= delta, plus optional disturbance input B2 and performance output C.
struct AgentModel {
    Matrix A;  // n x n
    Matrix B;  // n x m
    Matrix D;  // n x j
    Matrix E;  // k x n
    std::optional<Matrix> B2;  // n x p
    std::optional<Matrix> C;   // l x n
    double delta = 0.0;
    std::optional<double> gamma;
    TimeDomain mode = TimeDomain::Continuous;

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int j() const { return static_cast<int>(D.cols()); }
    int k() const { return static_cast<int>(E.rows()); }

    void validate() const;
    bool has_disturbance() const { return B2.has_value() && C.has_value(); }
    // Data magnitude used for LMI margins and pre-scaling.
    double scale() const;
};

// Synthesis certificate: the Lyapunov-side matrix (P continuous / Q discrete)
// plus the scalars produced by the feasibility solve.
struct SynthesisCertificate {
    Matrix lyapunov;
    double tau = 0.0;
    std::optional<double> eps;
    double lmi_margin = 0.0;
};

struct Controller {
    Matrix K;  // m x n
    std::optional<double> coupling_c;  // continuous designs only
    PinSet pins = PinSet::none(1);
    SynthesisCertificate certificate;
};

}  // namespace robustnet
