#include "ebwlan/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ebwlan {

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
    case Scenario::S4: return "S4";
    case Scenario::Boundary: return "boundary";
    }
    return "?";
}

namespace {

// p_c is nondecreasing in tau: invert by bisection on [0, hi]
double tau_at_pc(double target, double hi, const NetworkConfig& cfg) {
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (collision_prob_pc(mid, cfg) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

BoundaryTaus boundary_taus(const NetworkConfig& cfg, const SlotTimes& st) {
    cfg.validate();
    const SaturationPoint sat = solve_saturation(cfg, st);
    const double r = cfg.backoff_factor;
    const double pc_sat = sat.p_c;

    BoundaryTaus out;
    auto solve_boundary = [&](double pc_target, bool& clamped) {
        if (pc_target >= pc_sat) {
            clamped = true; // saturation arrives before the boundary (small-N regime)
            return sat.tau_s;
        }
        clamped = false;
        return tau_at_pc(pc_target, sat.tau_s, cfg);
    };
    out.tau_bbmd = solve_boundary(1.0 / (r * r), out.clamped_bbmd);
    out.tau_bbdj = solve_boundary(1.0 / (r * r * r), out.clamped_bbdj);
    return out;
}

Scenario classify_scenario(double tau_bbmd, double tau_s, double tau_star,
                           double s_bbmd, double s_s, double rel_tol) {
    const double scale = std::max({std::abs(s_bbmd), std::abs(s_s), 1e-300});
    if (std::abs(s_bbmd - s_s) < rel_tol * scale) return Scenario::Boundary;
    if (tau_s <= tau_star) return Scenario::S1;
    if (tau_bbmd >= tau_star) return Scenario::S4;
    return s_bbmd < s_s ? Scenario::S2 : Scenario::S3;
}

std::pair<double, double> safe_throughputs(double s_bbmd, double s_bbdj, double s_s) {
    return {std::min(s_bbmd, s_s), std::min(s_bbdj, s_s)};
}

CapacityReport capacity_report(const NetworkConfig& cfg, const SlotTimes& st) {
    const SaturationPoint sat = solve_saturation(cfg, st);
    const TauStar ts = find_tau_star(cfg, st);
    const BoundaryTaus bt = boundary_taus(cfg, st);

    CapacityReport rep;
    rep.tau_s = sat.tau_s;
    rep.s_s = sat.s_s_bps;
    rep.tau_star = ts.tau_star;
    rep.s_star = ts.s_star;
    rep.tau_bbmd = bt.tau_bbmd;
    rep.tau_bbdj = bt.tau_bbdj;
    rep.clamped_bbmd = bt.clamped_bbmd;
    rep.clamped_bbdj = bt.clamped_bbdj;
    rep.no_eb_regime = cfg.backoff_factor == 1.0;
    rep.s_bbmd = throughput_bps(bt.tau_bbmd, cfg, st);
    rep.s_bbdj = throughput_bps(bt.tau_bbdj, cfg, st);
    std::tie(rep.s_sbmd, rep.s_sbdj) = safe_throughputs(rep.s_bbmd, rep.s_bbdj, rep.s_s);
    rep.scenario = classify_scenario(rep.tau_bbmd, rep.tau_s, rep.tau_star, rep.s_bbmd, rep.s_s);
    return rep;
}

// ---- large-N Poisson machinery ---------------------------------------------

SlotProbabilities poisson_slot_probs(double eta, int mpr_capability) {
    SlotProbabilities out;
    out.view = SlotView::Generic;
    out.p_idle = poisson_attempt_prob(eta, 0);
    double succ = 0.0;
    for (int k = 1; k <= mpr_capability; ++k) succ += poisson_attempt_prob(eta, k);
    out.p_succ = succ;
    out.p_coll = std::max(0.0, 1.0 - out.p_idle - out.p_succ);
    return out;
}

namespace {

int sum_upper(int mpr_capability, PoissonSumLimit limit) {
    return limit == PoissonSumLimit::MminusOne ? mpr_capability - 1 : mpr_capability;
}

double attempt_sum(double eta, int upper) {
    double s = 0.0;
    for (int k = 1; k <= upper; ++k) s += poisson_attempt_prob(eta, k);
    return s;
}

} // namespace

double poisson_throughput_bps(double eta, int mpr_capability, const SlotTimes& st,
                              double payload_bits, PoissonSumLimit limit) {
    const SlotProbabilities probs = poisson_slot_probs(eta, mpr_capability);
    const double mean_slot = probs.p_idle * st.t_idle + probs.p_coll * st.t_coll
                           + probs.p_succ * st.t_succ;
    const int upper = sum_upper(mpr_capability, limit);
    return payload_bits * eta * attempt_sum(eta, upper) / mean_slot;
}

double solve_poisson_attempt_rate(double target, int mpr_capability, PoissonSumLimit limit) {
    const int upper = sum_upper(mpr_capability, limit);
    if (upper < 1)
        throw SolverError("poisson attempt-rate equation: empty sum (M = 1 with the printed limit)");
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("target must lie in (0,1)");

    // sum_{1..U} is unimodal with peak at (U!)^(1/U); p_c grows with eta on
    // the right branch, which is the physical one.
    const double eta_peak = std::exp(std::lgamma(upper + 1.0) / upper);
    const double f_peak = attempt_sum(eta_peak, upper);
    if (target > f_peak)
        throw SolverError("poisson attempt-rate equation: target above branch maximum");

    double lo = eta_peak, hi = eta_peak;
    while (attempt_sum(hi, upper) > target) {
        hi *= 2.0;
        if (hi > 1e9) throw SolverError("poisson attempt-rate equation: no upper bracket");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (attempt_sum(mid, upper) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

int boundary_power(CapacityTarget target) { return target == CapacityTarget::SBMD ? 2 : 3; }

// S_boundary(r) - S_s(r) in the Poisson regime; nullopt where the attempt
// rates have no solution
std::optional<double> poisson_crossing_gap(double r, int m, const SlotTimes& st, double pl,
                                           CapacityTarget target, PoissonSumLimit limit) {
    try {
        const double eta_s = solve_poisson_attempt_rate(1.0 - 1.0 / r, m, limit);
        const double eta_b =
            solve_poisson_attempt_rate(1.0 - std::pow(r, -boundary_power(target)), m, limit);
        return poisson_throughput_bps(eta_b, m, st, pl, limit)
             - poisson_throughput_bps(eta_s, m, st, pl, limit);
    } catch (const SolverError&) {
        return std::nullopt;
    }
}

// finite-N stand-in for the M = 1 case, where the printed Poisson sums are empty
constexpr int kLargeN = 10000;

double finite_n_crossing_gap(double r, AccessMode mode, const SlotTimes& st, double pl,
                             CapacityTarget target) {
    NetworkConfig cfg;
    cfg.n_stations = kLargeN;
    cfg.mpr_capability = 1;
    cfg.backoff_factor = r;
    cfg.min_window = 16;
    cfg.payload_bits = pl;
    cfg.access_mode = mode;
    const SaturationPoint sat = solve_saturation(cfg, st);
    const BoundaryTaus bt = boundary_taus(cfg, st);
    const double tau_b = target == CapacityTarget::SBMD ? bt.tau_bbmd : bt.tau_bbdj;
    return throughput_bps(tau_b, cfg, st) - sat.s_s_bps;
}

struct CrossingSolve {
    double r_star;
    double s_star;
    double eta_s = 0.0;
    double eta_b = 0.0;
};

CrossingSolve solve_crossing(int m, AccessMode mode, const SlotTimes& st, double pl,
                             CapacityTarget target, double r_max, PoissonSumLimit limit) {
    const bool exact = m == 1;
    auto gap = [&](double r) -> std::optional<double> {
        if (exact) return finite_n_crossing_gap(r, mode, st, pl, target);
        return poisson_crossing_gap(r, m, st, pl, target, limit);
    };

    // The boundary equation 1 - 1/r^k = f(eta) is solvable only while the
    // target stays below the peak of f; scan up to that edge so the (often
    // narrow) feasible window near it is not stepped over.
    double scan_hi = r_max;
    if (!exact) {
        const int upper = sum_upper(m, limit);
        const double eta_peak = std::exp(std::lgamma(upper + 1.0) / upper);
        const double f_peak = attempt_sum(eta_peak, upper);
        const double r_edge = std::pow(1.0 / (1.0 - f_peak), 1.0 / boundary_power(target));
        scan_hi = std::min(r_max, r_edge * (1.0 - 1e-12));
    }

    const int scan_points = 400;
    double prev_r = 0.0;
    std::optional<double> prev_gap;
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    for (int i = 0; i <= scan_points; ++i) {
        const double r = 1.0 + 1e-6 + (scan_hi - 1.0 - 1e-6) * double(i) / scan_points;
        const auto g = gap(r);
        if (g && prev_gap && (*g < 0.0) != (*prev_gap < 0.0)) {
            lo = prev_r;
            hi = r;
            bracketed = true;
            break;
        }
        if (g) {
            prev_r = r;
            prev_gap = g;
        }
    }
    if (!bracketed)
        throw SolverError("optimal backoff factor: no crossing of boundary and saturation throughput");

    double glo = *gap(lo);
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const auto gm = gap(mid);
        if (!gm) throw SolverError("optimal backoff factor: solve failed inside bracket");
        if ((*gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = *gm;
        } else {
            hi = mid;
        }
    }

    CrossingSolve out;
    out.r_star = 0.5 * (lo + hi);
    if (exact) {
        NetworkConfig cfg;
        cfg.n_stations = kLargeN;
        cfg.mpr_capability = 1;
        cfg.backoff_factor = out.r_star;
        cfg.min_window = 16;
        cfg.payload_bits = pl;
        cfg.access_mode = mode;
        out.s_star = solve_saturation(cfg, st).s_s_bps;
    } else {
        out.eta_s = solve_poisson_attempt_rate(1.0 - 1.0 / out.r_star, m, limit);
        out.eta_b = solve_poisson_attempt_rate(
            1.0 - std::pow(out.r_star, -boundary_power(target)), m, limit);
        out.s_star = poisson_throughput_bps(out.eta_s, m, st, pl, limit);
    }
    return out;
}

} // namespace

OptimalBackoff optimal_backoff_factor(int mpr_capability, AccessMode mode, const PhyParams& phy,
                                      double payload_bits, CapacityTarget target,
                                      double r_max, PoissonSumLimit limit) {
    if (mpr_capability < 1) throw std::invalid_argument("mpr_capability must be >= 1");
    const SlotTimes st = slot_times(mode, phy, payload_bits);

    const CrossingSolve main = solve_crossing(mpr_capability, mode, st, payload_bits,
                                              target, r_max, limit);
    OptimalBackoff out;
    out.r_star = main.r_star;
    out.s_star_bps = main.s_star;
    out.eta_s = main.eta_s;
    out.eta_boundary = main.eta_b;
    out.exact_finite_n = mpr_capability == 1;

    if (mpr_capability > 1) {
        const PoissonSumLimit other = limit == PoissonSumLimit::MminusOne
                                          ? PoissonSumLimit::M
                                          : PoissonSumLimit::MminusOne;
        try {
            out.s_star_alt_bps =
                solve_crossing(mpr_capability, mode, st, payload_bits, target, r_max, other).s_star;
        } catch (const SolverError&) {
            out.s_star_alt_bps = std::numeric_limits<double>::quiet_NaN();
        }
    } else {
        out.s_star_alt_bps = main.s_star;
    }
    return out;
}

std::vector<ScalingRow> scaling_sweep(int m_min, int m_max, AccessMode mode,
                                      const PhyParams& phy, double payload_bits,
                                      CapacityTarget target, PoissonSumLimit limit) {
    if (m_min < 1 || m_max < m_min) throw std::invalid_argument("bad M range");
    std::vector<ScalingRow> rows;
    for (int m = m_min; m <= m_max; ++m) {
        ScalingRow row;
        row.mpr_capability = m;
        try {
            const OptimalBackoff ob = optimal_backoff_factor(m, mode, phy, payload_bits,
                                                             target, 64.0, limit);
            row.r_star = ob.r_star;
            row.s_star_bps = ob.s_star_bps;
            row.s_star_per_m = ob.s_star_bps / m;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<ThroughputVsRRow> throughput_vs_r_sweep(const NetworkConfig& cfg, const SlotTimes& st,
                                                    std::span<const double> r_grid) {
    std::vector<ThroughputVsRRow> rows;
    rows.reserve(r_grid.size());
    for (double r : r_grid) {
        ThroughputVsRRow row;
        row.r = r;
        try {
            NetworkConfig c = cfg;
            c.backoff_factor = r;
            const SaturationPoint sat = solve_saturation(c, st);
            const BoundaryTaus bt = boundary_taus(c, st);
            row.s_s_bps = sat.s_s_bps;
            row.s_bbmd_bps = throughput_bps(bt.tau_bbmd, c, st);
            row.s_bbdj_bps = throughput_bps(bt.tau_bbdj, c, st);
            std::tie(row.s_sbmd_bps, row.s_sbdj_bps) =
                safe_throughputs(row.s_bbmd_bps, row.s_bbdj_bps, row.s_s_bps);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace ebwlan
