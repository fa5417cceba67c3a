#include "ebwlan/saturation.hpp"

#include "ebwlan/throughput.hpp"

#include <cmath>
#include <future>

namespace ebwlan {

namespace {

// tau = 2(1 - r p) / (W0 (1 - p) + 1 - r p); decreasing in p for r > 1
double window_equation_tau(double p_c, double r, int w0) {
    const double num = 2.0 * (1.0 - r * p_c);
    const double den = w0 * (1.0 - p_c) + 1.0 - r * p_c;
    return num / den;
}

// largest tau with p_c(tau) <= limit (p_c is nondecreasing in tau)
double tau_where_pc(double limit, const NetworkConfig& cfg) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (collision_prob_pc(mid, cfg) <= limit ? lo : hi) = mid;
    }
    return lo;
}

} // namespace

SaturationPoint solve_saturation(const NetworkConfig& cfg, const SlotTimes& st) {
    cfg.validate();
    SaturationPoint out;

    const bool collision_free = cfg.n_stations == 1 || cfg.mpr_capability >= cfg.n_stations;
    if (collision_free || cfg.backoff_factor == 1.0) {
        // p_c == 0 gives the closed form directly; at r == 1 the window
        // equation is the same constant for every p_c.
        out.tau_s = 2.0 / (cfg.min_window + 1.0);
        out.p_c = collision_free ? 0.0 : collision_prob_pc(out.tau_s, cfg);
        out.residual = std::abs(out.tau_s - window_equation_tau(out.p_c, cfg.backoff_factor, cfg.min_window));
        out.iterations = 0;
        out.s_s_bps = throughput_bps(out.tau_s, cfg, st);
        return out;
    }

    const double r = cfg.backoff_factor;
    auto residual = [&](double tau) {
        return tau - window_equation_tau(collision_prob_pc(tau, cfg), r, cfg.min_window);
    };

    // restrict the search to p_c(tau) <= 1/r, where the residual is monotone
    double hi = collision_prob_pc(1.0, cfg) < 1.0 / r ? 1.0 : tau_where_pc(1.0 / r, cfg);
    double lo = 1e-15;
    double flo = residual(lo);
    double fhi = residual(hi);
    if (flo > 0.0 || fhi < 0.0)
        throw SolverError("saturation fixed point: no bracket with r*p_c < 1");

    int iters = 0;
    for (; iters < 200; ++iters) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = residual(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (fm < 0.0) { lo = mid; flo = fm; }
        else { hi = mid; fhi = fm; }
    }

    out.tau_s = 0.5 * (lo + hi);
    out.p_c = collision_prob_pc(out.tau_s, cfg);
    out.residual = std::abs(residual(out.tau_s));
    out.iterations = iters;
    out.s_s_bps = throughput_bps(out.tau_s, cfg, st);
    return out;
}

std::vector<SaturationRow> saturation_sweep(
    const std::vector<NetworkConfig>& cfgs,
    const std::function<SlotTimes(const NetworkConfig&)>& slot_source) {
    if (cfgs.empty()) throw std::invalid_argument("saturation_sweep: empty config list");

    std::vector<std::future<SaturationRow>> futures;
    futures.reserve(cfgs.size());
    for (const auto& cfg : cfgs) {
        futures.push_back(std::async(std::launch::async, [&slot_source, cfg]() {
            SaturationRow row;
            row.cfg = cfg;
            try {
                row.point = solve_saturation(cfg, slot_source(cfg));
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        }));
    }

    std::vector<SaturationRow> rows;
    rows.reserve(cfgs.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

} // namespace ebwlan
