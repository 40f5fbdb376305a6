#pragma once

#include <vector>

#include "robustnet/graph.hpp"
#include "robustnet/matrix_ops.hpp"
#include "robustnet/synthesis_types.hpp"

namespace robustnet {

// State-space data of a strictly proper transfer function C (sI - A)^{-1} B
// (continuous) or C (zI - A)^{-1} B (discrete).
struct TransferTriple {
    Matrix A_cl;
    Matrix B_in;
    Matrix C_out;
};

// Per-eigenvalue stability / norm check of a verification run.
struct ModeCheck {
    double lambda = 0.0;     // eigenvalue of the pinned Laplacian (ct) or pinned stochastic matrix (dt)
    bool stable = false;
    double hinf_norm = 0.0;
    double bound = 0.0;      // 1/delta for stabilization, 1 for attenuation
    double margin = 0.0;     // bound*(1+tol) - norm
};

struct VerificationReport {
    std::vector<ModeCheck> modes;
    bool verdict = false;
    double tolerance_used = 0.0;
};

// max Re(eig) < -1e-9 ||m||.
bool is_hurwitz(const Matrix& m);

// spectral radius < 1 - 1e-9.
bool is_schur(const Matrix& m);

// H-infinity norm by gamma-bisection on the Hamiltonian imaginary-axis test.
// Relative accuracy tol. Rejects non-Hurwitz A_cl.
double hinf_norm_ct(const TransferTriple& t, double tol = 1e-6);

// Discrete H-infinity norm: bilinear (Cayley) transform to a continuous
// system (which picks up a feedthrough term), then the Hamiltonian test.
// Rejects non-Schur A_cl.
double hinf_norm_dt(const TransferTriple& t, double tol = 1e-6);

// Norm of C (sI-A)^{-1} B + D; used by the discrete path and available for
// scaled-system checks.
double hinf_norm_ct_general(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& D,
                            double tol = 1e-6);

// Decoupled quadratic-stabilization test: per eigenvalue of the pinned
// Laplacian (continuous) or pinned stochastic matrix (discrete), closed-loop
// stability plus H-infinity norm below (1/delta)(1+tolerance).
VerificationReport verify_stabilization(const AgentModel& model, const Network& network,
                                        const Controller& controller, double tolerance = 0.0);

// Scaled-system attenuation test: per eigenvalue, stability of the closed
// loop and unit H-infinity bound of the system with input
// [eps^(1/2) delta D, gamma^-1 B2] and output [eps^(-1/2) E; C].
VerificationReport verify_attenuation(const AgentModel& model, const Network& network,
                                      const Controller& controller, double eps,
                                      double tolerance = 0.0);

// Certificate residual. Continuous mode: A P + P A^T - lambda_eff B B^T +
// delta^2 D D^T + P E^T E P with lambda_eff the coupling-scaled eigenvalue
// (c lambda_i). Discrete mode: Ahat^T P Ahat - P + E^T E +
// delta^2 Ahat^T P D (I - delta^2 D^T P D)^{-1} D^T P Ahat with
// Ahat = A + (1 - lambda_i) B K and P the inverse of the certificate Q.
// Callers assert negative definiteness.
Matrix brl_residual(const Controller& controller, const AgentModel& model, double lambda_i);

}  // namespace robustnet
