#pragma once

#include "ebwlan/saturation.hpp"
#include "ebwlan/throughput.hpp"

#include <span>
#include <string>
#include <vector>

namespace ebwlan {

enum class Scenario { S1, S2, S3, S4, Boundary };
std::string to_string(Scenario s);

enum class CapacityTarget { SBMD, SBDJ };

/// Which upper limit the large-N Poisson sums use. The printed form stops at
/// M-1; the variant stops at M (consistent with the finite-N success sum).
enum class PoissonSumLimit { MminusOne, M };

struct CapacityReport {
    double tau_bbmd = 0.0, tau_bbdj = 0.0;
    double s_bbmd = 0.0, s_bbdj = 0.0; // bits/s
    double tau_s = 0.0, s_s = 0.0;
    double tau_star = 0.0, s_star = 0.0;
    double s_sbmd = 0.0, s_sbdj = 0.0; // min(boundary, saturation)
    Scenario scenario = Scenario::S1;
    bool clamped_bbmd = false; // small-N regime: boundary sits at tau_s
    bool clamped_bbdj = false;
    bool no_eb_regime = false; // r == 1: the p_c < 1/r^n conditions are vacuous
};

/// tau solving p_c(tau) = 1/r^2 (BBMD) and 1/r^3 (BBDJ), clamped to tau_s
/// when saturation is reached first.
struct BoundaryTaus {
    double tau_bbmd = 0.0;
    double tau_bbdj = 0.0;
    bool clamped_bbmd = false;
    bool clamped_bbdj = false;
};
BoundaryTaus boundary_taus(const NetworkConfig& cfg, const SlotTimes& st);

Scenario classify_scenario(double tau_bbmd, double tau_s, double tau_star,
                           double s_bbmd, double s_s, double rel_tol = 1e-9);

/// (s_sbmd, s_sbdj) = (min(s_bbmd, s_s), min(s_bbdj, s_s)).
std::pair<double, double> safe_throughputs(double s_bbmd, double s_bbdj, double s_s);

CapacityReport capacity_report(const NetworkConfig& cfg, const SlotTimes& st);

/// Large-N Poisson machinery -------------------------------------------------

/// Slot probabilities with Poisson(eta) attempts: idle e^-eta, success
/// sum_{1..M}, collision the rest.
SlotProbabilities poisson_slot_probs(double eta, int mpr_capability);

/// Throughput with Poisson attempts; the numerator sum follows `limit`.
double poisson_throughput_bps(double eta, int mpr_capability, const SlotTimes& st,
                              double payload_bits, PoissonSumLimit limit);

/// Root of sum_{k=1..U} eta^k e^-eta / k! = target on the branch where the
/// sum decreases in eta (the physically consistent branch: p_c grows with
/// attempt rate). Throws SolverError when target exceeds the branch maximum.
double solve_poisson_attempt_rate(double target, int mpr_capability, PoissonSumLimit limit);

struct OptimalBackoff {
    double r_star = 0.0;
    double s_star_bps = 0.0;     // throughput at the crossing
    double s_star_alt_bps = 0.0; // same solve under the other sum limit
    double eta_s = 0.0;          // saturation attempt rate at r_star
    double eta_boundary = 0.0;   // BBMD/BBDJ attempt rate at r_star
    bool exact_finite_n = false; // M = 1 path
};

/// r maximizing the safe throughput: the crossing S_boundary(r) = S_s(r),
/// located by bisection after a coarse scan. M = 1 falls back to the exact
/// finite-N formulation (the Poisson sums are empty there).
OptimalBackoff optimal_backoff_factor(int mpr_capability, AccessMode mode, const PhyParams& phy,
                                      double payload_bits, CapacityTarget target,
                                      double r_max = 64.0,
                                      PoissonSumLimit limit = PoissonSumLimit::MminusOne);

struct ScalingRow {
    int mpr_capability = 0;
    double r_star = 0.0;
    double s_star_bps = 0.0;
    double s_star_per_m = 0.0;
    std::string error;
};

std::vector<ScalingRow> scaling_sweep(int m_min, int m_max, AccessMode mode,
                                      const PhyParams& phy, double payload_bits,
                                      CapacityTarget target,
                                      PoissonSumLimit limit = PoissonSumLimit::MminusOne);

struct ThroughputVsRRow {
    double r = 0.0;
    double s_s_bps = 0.0;
    double s_bbmd_bps = 0.0;
    double s_bbdj_bps = 0.0;
    double s_sbmd_bps = 0.0;
    double s_sbdj_bps = 0.0;
    std::string error;
};

/// Finite-N sensitivity sweep: saturation and boundary throughputs per r.
std::vector<ThroughputVsRRow> throughput_vs_r_sweep(const NetworkConfig& cfg, const SlotTimes& st,
                                                    std::span<const double> r_grid);

} // namespace ebwlan
