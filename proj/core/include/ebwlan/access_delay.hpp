#pragma once

#include "ebwlan/contention.hpp"
#include "ebwlan/phy_timing.hpp"

#include <complex>
#include <optional>

namespace ebwlan {

/// Raw moments of the countdown-slot length seen by a backlogged station:
/// A_j = T_succ^j P_succ^B + T_coll^j P_coll^B + T_idle^j P_idle^B.
struct BackoffConstants {
    double a1 = 0.0; // s
    double a2 = 0.0; // s^2
    double a3 = 0.0; // s^3
};

BackoffConstants backoff_constants(const SlotProbabilities& probs_b, const SlotTimes& st);

/// L*(s): Laplace transform of one countdown-slot length. Entire in s, so
/// negative s is accepted (finite-difference probes straddle 0); a complex
/// overload exists for frequency-domain callers.
double countdown_slot_transform(double s, const SlotProbabilities& probs_b, const SlotTimes& st);
std::complex<double> countdown_slot_transform(std::complex<double> s,
                                              const SlotProbabilities& probs_b,
                                              const SlotTimes& st);

/// B_i(z) = (1 - z^Wi) / (Wi (1 - z)) with Wi = r^(i-1) W0 (real-valued).
/// z = 1 returns 1 (removable singularity).
double backoff_window_transform(int stage, double z, const NetworkConfig& cfg);

struct CentralMoments {
    double mean = 0.0;
    double variance = 0.0;
    double third_central = 0.0;
};

/// Mean, variance, third central moment of the backoff period C_i preceding
/// the i-th transmission attempt (stage >= 1).
CentralMoments backoff_period_moments(int stage, const BackoffConstants& c, const NetworkConfig& cfg);

/// Pr{R = j} = p_c^(j-1) (1 - p_c): success on the j-th attempt.
double retry_count_prob(int j, double p_c);

struct MomentConditions {
    bool m1 = false; // p_c < 1/r
    bool m2 = false; // p_c < 1/r^2
    bool m3 = false; // p_c < 1/r^3
};

/// First three raw moments of the service time X_ne of a head-of-line packet
/// at a backlogged station. A moment whose convergence condition fails is
/// absent (divergence is a value here, not an error).
struct ServiceMoments {
    std::optional<double> m1; // s
    std::optional<double> m2; // s^2
    std::optional<double> m3; // s^3
    MomentConditions conditions;

    double variance() const { return *m2 - *m1 * *m1; } // both moments must be present
};

ServiceMoments service_moments(double p_c, const BackoffConstants& c,
                               const SlotTimes& st, const NetworkConfig& cfg);

/// X_ne*(s) by direct summation over the retry count: partial sums accumulate
/// until the j-th term drops below tol * |sum|. Accepts small negative s
/// (the series still converges near 0 when p_c < 1/r).
/// Throws SolverError if 1000 terms do not reach tol.
double service_transform(double s, double p_c, const SlotProbabilities& probs_b,
                         const SlotTimes& st, const NetworkConfig& cfg, double tol = 1e-12);

} // namespace ebwlan
