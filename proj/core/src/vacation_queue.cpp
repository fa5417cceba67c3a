#include "ebwlan/vacation_queue.hpp"

#include "ebwlan/saturation.hpp"
#include "ebwlan/throughput.hpp"

#include <cmath>
#include <limits>

namespace ebwlan {

VacationMoments vacation_moments(const BackoffConstants& c) {
    if (!(c.a1 > 0.0)) throw std::invalid_argument("vacation_moments: a1 must be > 0");
    return {c.a2 / (2.0 * c.a1), c.a3 / (3.0 * c.a1)};
}

double vacation_recurrence_transform(double s, const BackoffConstants& c,
                                     const SlotProbabilities& probs_b, const SlotTimes& st) {
    if (probs_b.view != SlotView::BackoffView)
        throw std::invalid_argument("vacation_recurrence_transform expects backoff-view probabilities");
    if (!(c.a1 > 0.0)) throw std::invalid_argument("a1 must be > 0");
    if (s == 0.0) return 1.0;
    // 1 - L*(s) via expm1 keeps full precision near s = 0
    const double one_minus_l = probs_b.p_idle * -std::expm1(-s * st.t_idle)
                             + probs_b.p_coll * -std::expm1(-s * st.t_coll)
                             + probs_b.p_succ * -std::expm1(-s * st.t_succ);
    return one_minus_l / (s * c.a1);
}

namespace {

double rho_tilde_of(double lambda, double p_c, const SlotTimes& st, const NetworkConfig& cfg,
                    const BackoffConstants& c) {
    const ServiceMoments sm = service_moments(p_c, c, st, cfg);
    if (!sm.m1) return std::numeric_limits<double>::infinity();
    return lambda * *sm.m1;
}

} // namespace

double delay_transform(double s, double lambda, double p_c,
                       const SlotProbabilities& probs_b, const SlotTimes& st,
                       const NetworkConfig& cfg) {
    const BackoffConstants c = backoff_constants(probs_b, st);
    const double rho_t = rho_tilde_of(lambda, p_c, st, cfg, c);
    if (!(rho_t < 1.0)) throw UnstableSystem("delay_transform: rho_tilde >= 1");
    if (s == 0.0) return 1.0;
    const double x = service_transform(s, p_c, probs_b, st, cfg);
    const double y = vacation_recurrence_transform(s, c, probs_b, st);
    return (1.0 - rho_t) * x * s * y / (lambda * x - lambda + s);
}

double pk_delay_transform(double s, double lambda, double p_c,
                          const SlotProbabilities& probs_b, const SlotTimes& st,
                          const NetworkConfig& cfg) {
    const BackoffConstants c = backoff_constants(probs_b, st);
    const double rho_t = rho_tilde_of(lambda, p_c, st, cfg, c);
    if (!(rho_t < 1.0)) throw UnstableSystem("pk_delay_transform: rho_tilde >= 1");
    if (s == 0.0) return 1.0;
    const double x = service_transform(s, p_c, probs_b, st, cfg);
    return (1.0 - rho_t) * x * s / (lambda * x - lambda + s);
}

double queue_size_pgf(double z, double lambda, double p_c,
                      const SlotProbabilities& probs_b, const SlotTimes& st,
                      const NetworkConfig& cfg) {
    const BackoffConstants c = backoff_constants(probs_b, st);
    const double rho_t = rho_tilde_of(lambda, p_c, st, cfg, c);
    if (!(rho_t < 1.0)) throw UnstableSystem("queue_size_pgf: rho_tilde >= 1");
    if (z == 1.0) return 1.0;
    const double s = lambda - lambda * z;
    const double x = service_transform(s, p_c, probs_b, st, cfg);
    const double y = vacation_recurrence_transform(s, c, probs_b, st);
    return (1.0 - rho_t) * x * (1.0 - z) * y / (x - z);
}

std::optional<double> mean_delay(double lambda, const ServiceMoments& sm, double ey) {
    if (!sm.m1 || !sm.m2) return std::nullopt;
    const double rho_t = lambda * *sm.m1;
    if (rho_t >= 1.0) return std::nullopt;
    return *sm.m1 + ey + lambda * *sm.m2 / (2.0 * (1.0 - rho_t));
}

std::optional<double> delay_jitter(double lambda, const ServiceMoments& sm,
                                   double ey, double ey2) {
    if (!sm.m1 || !sm.m2 || !sm.m3) return std::nullopt;
    const double rho_t = lambda * *sm.m1;
    if (rho_t >= 1.0) return std::nullopt;
    const double var_x = *sm.m2 - *sm.m1 * *sm.m1;
    const double var_y = ey2 - ey * ey;
    const double m2 = *sm.m2;
    return var_x + var_y
         + lambda * lambda * m2 * m2 / (4.0 * (1.0 - rho_t) * (1.0 - rho_t))
         + lambda * *sm.m3 / (3.0 * (1.0 - rho_t));
}

double utilization(double lambda, double rho_tilde, const BackoffConstants& c,
                   const SlotProbabilities& probs_b, const SlotTimes& st) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (rho_tilde >= 1.0) return 1.0;
    return 1.0 - (1.0 - rho_tilde) * vacation_recurrence_transform(lambda, c, probs_b, st);
}

StabilityCheck stability_condition(double lambda, double p_c, const BackoffConstants& c,
                                   const SlotTimes& st, const NetworkConfig& cfg) {
    StabilityCheck out;
    const double r = cfg.backoff_factor;
    const double w0 = cfg.min_window;
    const double den = 2.0 * (1.0 - p_c)
                     - 2.0 * lambda * st.t_succ * (1.0 - p_c)
                     - 2.0 * lambda * st.t_coll * p_c
                     + lambda * c.a1;
    out.lhs = p_c * r + lambda * c.a1 * w0 * (1.0 - p_c) / den;
    out.stable = den > 0.0 && out.lhs < 1.0;
    out.margin = 1.0 - out.lhs;
    out.rho_tilde = rho_tilde_of(lambda, p_c, st, cfg, c);
    return out;
}

double rho_tilde_derivative_aloha(double tau, const NetworkConfig& cfg) {
    // ALOHA, M = 1, equal slots: rho~(tau) = (tau q (W0+r) + tau (1-r)) / (2 (1-r+rq))
    // with q = (1-tau)^(N-1). Derivative numerator regrouped as
    // W0 r q^2 + W0 (1-tau)^(N-2) (1-N tau)(1-r) + (1 - p_c r)^2.
    const double n = cfg.n_stations;
    const double r = cfg.backoff_factor;
    const double w0 = cfg.min_window;
    const double q = std::pow(1.0 - tau, n - 1.0);
    const double pc_r = (1.0 - q) * r;
    const double numer = w0 * r * q * q
                       + w0 * std::pow(1.0 - tau, n - 2.0) * (1.0 - n * tau) * (1.0 - r)
                       + (1.0 - pc_r) * (1.0 - pc_r);
    const double base = r * q + 1.0 - r;
    return numer / (2.0 * base * base);
}

MonotonicityReport rho_tilde_monotonicity_check(const NetworkConfig& cfg, const SlotTimes& st,
                                                std::span<const double> tau_grid) {
    cfg.validate();
    MonotonicityReport report;

    auto rho_at = [&](double tau) {
        const double p_c = collision_prob_pc(tau, cfg);
        const SlotProbabilities pb = backoff_view_slot_probs(tau, cfg);
        const BackoffConstants c = backoff_constants(pb, st);
        const double lam = throughput_bps(tau, cfg, st) / (cfg.n_stations * cfg.payload_bits);
        return rho_tilde_of(lam, p_c, st, cfg, c);
    };

    double prev = -std::numeric_limits<double>::infinity();
    for (double tau : tau_grid) {
        MonotonicityPoint pt;
        pt.tau = tau;
        pt.offered_lambda = throughput_bps(tau, cfg, st) / (cfg.n_stations * cfg.payload_bits);
        pt.rho_tilde = rho_at(tau);
        report.points.push_back(pt);
        if (std::isfinite(prev) && std::isfinite(pt.rho_tilde)
            && pt.rho_tilde < prev * (1.0 - 1e-9) - 1e-12)
            report.violations.push_back(tau);
        prev = pt.rho_tilde;
    }

    report.rho_tilde_at_tau_s = rho_at(solve_saturation(cfg, st).tau_s);

    const bool equal_slots = st.t_idle == st.t_coll && st.t_coll == st.t_succ;
    if (cfg.access_mode == AccessMode::SlottedAloha && cfg.mpr_capability == 1 && equal_slots) {
        report.closed_form_checked = true;
        const double h = 1e-7;
        for (double tau : tau_grid) {
            if (tau <= h || tau >= 1.0 - h) continue;
            const double p_c = collision_prob_pc(tau, cfg);
            if (p_c * cfg.backoff_factor >= 1.0) break; // m1 divergent beyond this
            if (collision_prob_pc(tau + h, cfg) * cfg.backoff_factor >= 1.0) break;
            const double analytic = rho_tilde_derivative_aloha(tau, cfg);
            const double fd = (rho_at(tau + h) - rho_at(tau - h)) / (2.0 * h);
            const double mismatch = std::abs(analytic - fd) / std::max(std::abs(fd), 1e-300);
            report.max_derivative_mismatch = std::max(report.max_derivative_mismatch, mismatch);
            if (cfg.n_stations * tau > 1.0 && analytic <= 0.0)
                report.derivative_positive = false;
        }
    }
    return report;
}

DelayStats analyze_delay_at_tau(const NetworkConfig& cfg, const SlotTimes& st, double tau) {
    cfg.validate();
    DelayStats out;
    out.tau = tau;
    out.p_c = collision_prob_pc(tau, cfg);
    const SlotProbabilities pb = backoff_view_slot_probs(tau, cfg);
    const BackoffConstants c = backoff_constants(pb, st);
    const VacationMoments vm = vacation_moments(c);
    out.ey = vm.ey;
    out.ey2 = vm.ey2;
    out.service = service_moments(out.p_c, c, st, cfg);

    const double lambda = cfg.arrival_rate;
    out.rho_tilde = out.service.m1 ? lambda * *out.service.m1
                                   : std::numeric_limits<double>::infinity();
    out.rho = utilization(lambda, std::min(out.rho_tilde, 1.0), c, pb, st);
    out.mean_delay_s = mean_delay(lambda, out.service, vm.ey);
    out.jitter_var_s2 = delay_jitter(lambda, out.service, vm.ey, vm.ey2);

    out.verdict.stable = out.service.m1 && out.rho_tilde < 1.0;
    out.verdict.bounded_mean = out.verdict.stable && out.service.conditions.m2;
    out.verdict.bounded_jitter = out.verdict.bounded_mean && out.service.conditions.m3;
    return out;
}

} // namespace ebwlan
