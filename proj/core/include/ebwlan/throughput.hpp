#pragma once

#include "ebwlan/contention.hpp"
#include "ebwlan/phy_timing.hpp"

#include <optional>

namespace ebwlan {

/// S(tau): information bits delivered per second at transmission probability
/// tau. Zero at tau = 0, and at tau = 1 whenever N > M.
double throughput_bps(double tau, const NetworkConfig& cfg, const SlotTimes& st);

struct TauStar {
    double tau_star = 1.0;
    double s_star = 0.0;            // bits/s
    bool degenerate_n_le_m = false; // N <= M: S is nondecreasing, tau* = 1
};

/// Maximizer of S(tau) on (0,1). Golden-section search; S is unimodal for
/// N > M.
TauStar find_tau_star(const NetworkConfig& cfg, const SlotTimes& st);

enum class LoadCase {
    CaseI,   // tau_l < tau_s < tau_r          (N*lambda < S_s)
    CaseII,  // tau_l < tau_r < tau_s          (N*lambda >= S_s, tau_s > tau*)
    CaseIII, // tau_s < tau_l < tau_r          (N*lambda >= S_s, tau_s < tau*)
};

/// Roots of S(tau) = offered load, plus the saturation point used to label
/// which roots can actually be steady-state operating points (no tau above
/// tau_s can).
struct OperatingPoints {
    std::optional<double> tau_l;
    std::optional<double> tau_r;
    double tau_star = 0.0;
    double s_star = 0.0;
    double tau_s = 0.0;
    double offered_load_bps = 0.0;
    std::optional<LoadCase> relationship; // absent when there are no roots
    bool tau_l_operating = false;
    bool tau_r_operating = false;
};

/// Solve S(tau) = N * lambda * PL on both sides of tau*.
/// Both roots are absent when the offered load exceeds S*; a tangent load
/// (|tau_l - tau_r| < 1e-9) is reported as a single left root.
OperatingPoints offered_load_roots(const NetworkConfig& cfg, const SlotTimes& st);

} // namespace ebwlan
