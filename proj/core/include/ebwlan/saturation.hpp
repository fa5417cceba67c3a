#pragma once

#include "ebwlan/contention.hpp"
#include "ebwlan/phy_timing.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ebwlan {

struct SaturationPoint {
    double tau_s = 0.0;
    double p_c = 0.0;
    double s_s_bps = 0.0;
    double residual = 0.0; // |tau_s - window_eq(p_c(tau_s))|
    int iterations = 0;
};

/// Saturated operating point: tau = 2(1-r*p_c) / (W0(1-p_c) + 1 - r*p_c)
/// with p_c = collision_prob_pc(tau). Solved by bisection on the residual,
/// which is monotone on the interval where r*p_c(tau) < 1; p_c(tau_s) < 1/r
/// always holds for the returned point.
///
/// Closed form 2/(W0+1) is returned exactly when p_c is identically zero
/// (N == 1 or M >= N). Throws SolverError if no bracket exists.
SaturationPoint solve_saturation(const NetworkConfig& cfg, const SlotTimes& st);

struct SaturationRow {
    NetworkConfig cfg;
    SaturationPoint point; // valid iff error is empty
    std::string error;
};

/// Per-config solve; failures are captured per row and the sweep continues.
/// Throws std::invalid_argument on an empty input.
std::vector<SaturationRow> saturation_sweep(
    const std::vector<NetworkConfig>& cfgs,
    const std::function<SlotTimes(const NetworkConfig&)>& slot_source);

} // namespace ebwlan
