#pragma once

#include "ebwlan/access_delay.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ebwlan {

/// E[Y] and E[Y^2] of the forward recurrence time of a vacation slot.
struct VacationMoments {
    double ey = 0.0;  // a2 / (2 a1)
    double ey2 = 0.0; // a3 / (3 a1)
};

VacationMoments vacation_moments(const BackoffConstants& c);

/// Y*(s) = (1 - L*(s)) / (s A1); 1 at s = 0 by the limit. Series-expanded
/// near s = 0 to avoid the 0/0.
double vacation_recurrence_transform(double s, const BackoffConstants& c,
                                     const SlotProbabilities& probs_b, const SlotTimes& st);

/// D*(s) for the M/G/1 queue with multiple vacations:
/// (1 - rho~) X*(s) s Y*(s) / (lambda X*(s) - lambda + s).
/// Throws UnstableSystem when rho~ = lambda E[X_ne] >= 1.
double delay_transform(double s, double lambda, double p_c,
                       const SlotProbabilities& probs_b, const SlotTimes& st,
                       const NetworkConfig& cfg);

/// Plain Pollaczek-Khinchin system time (no vacations); the vacation result
/// must reduce to this when Y* is forced to 1.
double pk_delay_transform(double s, double lambda, double p_c,
                          const SlotProbabilities& probs_b, const SlotTimes& st,
                          const NetworkConfig& cfg);

/// Z-transform of the queue size left behind by a departure.
/// Q(1) = 1, Q(0) = 1 - rho. Throws UnstableSystem when rho~ >= 1.
double queue_size_pgf(double z, double lambda, double p_c,
                      const SlotProbabilities& probs_b, const SlotTimes& st,
                      const NetworkConfig& cfg);

/// E[D] = m1 + E[Y] + lambda m2 / (2(1 - rho~)); absent when rho~ >= 1 or m2
/// diverges (bounded mean delay needs both).
std::optional<double> mean_delay(double lambda, const ServiceMoments& sm, double ey);

/// VAR[D] = VAR[X] + VAR[Y] + lambda^2 m2^2 / (4(1-rho~)^2)
///          + lambda m3 / (3(1-rho~)); absent when rho~ >= 1 or m3 diverges.
std::optional<double> delay_jitter(double lambda, const ServiceMoments& sm,
                                   double ey, double ey2);

/// rho = 1 - (1 - rho~) Y*(lambda); never below rho~.
double utilization(double lambda, double rho_tilde, const BackoffConstants& c,
                   const SlotProbabilities& probs_b, const SlotTimes& st);

struct StabilityCheck {
    bool stable = false;     // lhs < 1 evaluated per the window-form condition
    double lhs = 0.0;        // p_c r + lambda A1 W0 (1-p_c) / D(lambda)
    double rho_tilde = 0.0;  // lambda * m1, the cross-check; the two tests agree
    double margin = 0.0;     // 1 - lhs
};

/// Stability condition in its window form; rho_tilde is returned alongside so
/// callers can confirm the algebraic equivalence with rho~ < 1.
StabilityCheck stability_condition(double lambda, double p_c, const BackoffConstants& c,
                                   const SlotTimes& st, const NetworkConfig& cfg);

struct MonotonicityPoint {
    double tau = 0.0;
    double rho_tilde = 0.0;       // infinity once p_c(tau) >= 1/r
    double offered_lambda = 0.0;  // per-station arrival rate sustaining tau
};

struct MonotonicityReport {
    std::vector<MonotonicityPoint> points;
    std::vector<double> violations;   // tau values where rho~ decreased
    double rho_tilde_at_tau_s = 0.0;  // equals 1 up to solver tolerance
    bool closed_form_checked = false; // analytic-derivative branch ran
    double max_derivative_mismatch = 0.0; // analytic vs central difference, relative
    bool derivative_positive = true;      // sign of the closed form where preconditions hold
};

/// rho~(tau) along a tau grid, where lambda is the offered load that sustains
/// tau (throughput equation) and m1 is evaluated at p_c(tau). The closed-form
/// derivative branch runs for slotted ALOHA with M = 1 and equal slots.
MonotonicityReport rho_tilde_monotonicity_check(const NetworkConfig& cfg, const SlotTimes& st,
                                                std::span<const double> tau_grid);

/// d(rho~)/dtau for the ALOHA M=1 equal-slot case, p_c < 1/r branch.
double rho_tilde_derivative_aloha(double tau, const NetworkConfig& cfg);

struct DelayVerdict {
    bool stable = false;
    bool bounded_mean = false;
    bool bounded_jitter = false;
};

/// Everything the delay report needs at one operating point. The boundedness
/// verdicts are exact for large N and labelled so downstream.
struct DelayStats {
    double tau = 0.0;
    double p_c = 0.0;
    double rho_tilde = 0.0;
    double rho = 0.0;
    double ey = 0.0;
    double ey2 = 0.0;
    ServiceMoments service;
    std::optional<double> mean_delay_s;
    std::optional<double> jitter_var_s2;
    DelayVerdict verdict;
};

/// Delay analysis at a given transmission probability with the arrival rate
/// taken from cfg.
DelayStats analyze_delay_at_tau(const NetworkConfig& cfg, const SlotTimes& st, double tau);

} // namespace ebwlan
