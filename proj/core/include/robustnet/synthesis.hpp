#pragma once

#include <optional>

#include "robustnet/graph.hpp"
#include "robustnet/lmi.hpp"
#include "robustnet/synthesis_types.hpp"

namespace robustnet {

// c_th = tau / lambda_min; both arguments must be positive.
double coupling_threshold(double tau, double lambda_min);

// Continuous-time quadratic stabilization: solve the (P, tau) feasibility
// problem, take K = -1/2 B^T P^{-1} and c = coupling_threshold.
Controller synth_ct(const AgentModel& model, const Network& network);

// Continuous-time quadratic stabilization with disturbance attenuation gamma:
// solve for (Q, tau~, eps), K = -1/2 B^T Q^{-1}.
Controller synth_ct_hinf(const AgentModel& model, const Network& network);

// Discrete-time quadratic stabilization treating the pinned-stochastic
// eigenvalues as a disk uncertainty of radius kappa: solve the (Q, W, tau)
// feasibility problem, K = W Q^{-1}. kappa defaults to the network's actual
// eigenvalue radius; overrides below that are rejected.
Controller synth_dt(const AgentModel& model, const Network& network,
                    std::optional<double> kappa = std::nullopt);

// Discrete counterpart with disturbance attenuation: (Q, W, tau, eps).
Controller synth_dt_hinf(const AgentModel& model, const Network& network,
                         std::optional<double> kappa = std::nullopt);

// Largest uncertainty bound delta for which the matching synthesis LMI stays
// feasible (bisection over the delta family; cap per maximize_parameter).
MaximizeResult max_delta(const AgentModel& model, const Network& network,
                         std::optional<double> kappa = std::nullopt, double tol = 1e-3);

// The LMI families behind the synthesis routines, exposed for certificate
// cross-checks and the delta-maximization tests.
LmiProblem stabilization_lmi_ct(const AgentModel& model, double delta);
LmiProblem attenuation_lmi_ct(const AgentModel& model, double delta);
LmiProblem stabilization_lmi_dt(const AgentModel& model, double delta, double kappa);
LmiProblem attenuation_lmi_dt(const AgentModel& model, double delta, double kappa);

}  // namespace robustnet
