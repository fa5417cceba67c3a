#include "ebwlan/throughput.hpp"

#include "ebwlan/saturation.hpp"

#include <cmath>

namespace ebwlan {

namespace {

double mean_slot_s(const SlotProbabilities& p, const SlotTimes& st) {
    return p.p_idle * st.t_idle + p.p_coll * st.t_coll + p.p_succ * st.t_succ;
}

} // namespace

double throughput_bps(double tau, const NetworkConfig& cfg, const SlotTimes& st) {
    const SlotProbabilities probs = generic_slot_probs(tau, cfg);
    const int k_max = std::min(cfg.mpr_capability, cfg.n_stations);
    double delivered = 0.0; // E[packets decoded per slot]
    for (int k = 1; k <= k_max; ++k)
        delivered += k * binomial_pmf(cfg.n_stations, k, tau);
    return cfg.payload_bits * delivered / mean_slot_s(probs, st);
}

TauStar find_tau_star(const NetworkConfig& cfg, const SlotTimes& st) {
    cfg.validate();
    TauStar out;
    if (cfg.n_stations <= cfg.mpr_capability) {
        // collisions impossible; S grows with tau
        out.degenerate_n_le_m = true;
        out.tau_star = 1.0;
        out.s_star = throughput_bps(1.0, cfg, st);
        return out;
    }

    // golden-section on the unimodal S
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = throughput_bps(x1, cfg, st);
    double f2 = throughput_bps(x2, cfg, st);
    for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = throughput_bps(x2, cfg, st);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = throughput_bps(x1, cfg, st);
        }
    }
    out.tau_star = 0.5 * (a + b);
    out.s_star = throughput_bps(out.tau_star, cfg, st);
    out.degenerate_n_le_m = false;
    return out;
}

namespace {

// root of S(tau) = load on [lo, hi] where S - load changes sign; bisects to
// double resolution. Returns nullopt when no sign change.
std::optional<double> bisect_throughput(const NetworkConfig& cfg, const SlotTimes& st,
                                        double load, double lo, double hi) {
    double flo = throughput_bps(lo, cfg, st) - load;
    double fhi = throughput_bps(hi, cfg, st) - load;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = throughput_bps(mid, cfg, st) - load;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid; flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

OperatingPoints offered_load_roots(const NetworkConfig& cfg, const SlotTimes& st) {
    cfg.validate();
    const double load = cfg.n_stations * cfg.arrival_rate * cfg.payload_bits;

    OperatingPoints out;
    const TauStar ts = find_tau_star(cfg, st);
    out.tau_star = ts.tau_star;
    out.s_star = ts.s_star;
    out.offered_load_bps = load;

    const SaturationPoint sat = solve_saturation(cfg, st);
    out.tau_s = sat.tau_s;

    if (load > ts.s_star) return out; // offered load not achievable at any tau

    out.tau_l = bisect_throughput(cfg, st, load, 0.0, ts.tau_star);
    if (!ts.degenerate_n_le_m)
        out.tau_r = bisect_throughput(cfg, st, load, ts.tau_star, 1.0);

    // tangency: collapse to one root
    if (out.tau_l && out.tau_r && std::abs(*out.tau_l - *out.tau_r) < 1e-9)
        out.tau_r.reset();

    if (out.tau_l || out.tau_r) {
        if (load < sat.s_s_bps)
            out.relationship = LoadCase::CaseI;
        else
            out.relationship = sat.tau_s >= ts.tau_star ? LoadCase::CaseII : LoadCase::CaseIII;
    }

    const double tau_s_edge = sat.tau_s * (1.0 + 1e-9) + 1e-15;
    out.tau_l_operating = out.tau_l && *out.tau_l <= tau_s_edge;
    out.tau_r_operating = out.tau_r && *out.tau_r <= tau_s_edge;
    return out;
}

} // namespace ebwlan
