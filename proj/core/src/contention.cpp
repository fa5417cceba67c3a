#include "ebwlan/contention.hpp"

#include <algorithm>
#include <cmath>

namespace ebwlan {

std::string to_string(AccessMode mode) {
    switch (mode) {
    case AccessMode::SlottedAloha: return "slotted_aloha";
    case AccessMode::DcfBasic: return "dcf_basic";
    case AccessMode::DcfRtsCts: return "dcf_rts_cts";
    }
    return "?";
}

AccessMode access_mode_from_string(std::string_view s) {
    if (s == "slotted_aloha" || s == "aloha") return AccessMode::SlottedAloha;
    if (s == "dcf_basic" || s == "basic") return AccessMode::DcfBasic;
    if (s == "dcf_rts_cts" || s == "rts_cts") return AccessMode::DcfRtsCts;
    throw std::invalid_argument("unknown access mode: " + std::string(s));
}

void NetworkConfig::validate() const {
    if (n_stations < 1) throw std::invalid_argument("n_stations must be >= 1");
    if (mpr_capability < 1) throw std::invalid_argument("mpr_capability must be >= 1");
    if (backoff_factor < 1.0) throw std::invalid_argument("backoff_factor must be >= 1");
    if (min_window < 1) throw std::invalid_argument("min_window must be >= 1");
    if (arrival_rate < 0.0) throw std::invalid_argument("arrival_rate must be >= 0");
    if (payload_bits <= 0.0) throw std::invalid_argument("payload_bits must be > 0");
}

namespace {

void check_tau(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0))
        throw std::invalid_argument("tau must lie in [0,1]");
}

} // namespace

double binomial_pmf(int n, int k, double tau) {
    if (k < 0 || k > n) return 0.0;
    if (tau == 0.0) return k == 0 ? 1.0 : 0.0;
    if (tau == 1.0) return k == n ? 1.0 : 0.0;
    double log_p = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)
                 + k * std::log(tau) + (n - k) * std::log1p(-tau);
    return std::exp(log_p);
}

namespace {

// tail Pr{X > m} for X ~ Binomial(n, tau)
double binomial_tail_above(int n, int m, double tau) {
    if (m >= n) return 0.0;
    double sum = 0.0;
    for (int k = m + 1; k <= n; ++k) sum += binomial_pmf(n, k, tau);
    return std::min(sum, 1.0);
}

} // namespace

SlotProbabilities generic_slot_probs(double tau, const NetworkConfig& cfg) {
    check_tau(tau);
    cfg.validate();
    SlotProbabilities out;
    out.view = SlotView::Generic;
    out.p_idle = binomial_pmf(cfg.n_stations, 0, tau);
    out.p_coll = binomial_tail_above(cfg.n_stations, cfg.mpr_capability, tau);
    out.p_succ = std::max(0.0, 1.0 - out.p_idle - out.p_coll);
    return out;
}

SlotProbabilities backoff_view_slot_probs(double tau, const NetworkConfig& cfg) {
    check_tau(tau);
    cfg.validate();
    const int others = cfg.n_stations - 1;
    SlotProbabilities out;
    out.view = SlotView::BackoffView;
    out.p_idle = binomial_pmf(others, 0, tau);
    out.p_coll = binomial_tail_above(others, cfg.mpr_capability, tau);
    out.p_succ = std::max(0.0, 1.0 - out.p_idle - out.p_coll);
    return out;
}

double attempt_count_prob(double tau, const NetworkConfig& cfg, int k) {
    check_tau(tau);
    if (k < 0 || k > cfg.n_stations)
        throw std::invalid_argument("attempt count k outside [0, N]");
    return binomial_pmf(cfg.n_stations, k, tau);
}

double collision_prob_pc(double tau, const NetworkConfig& cfg) {
    check_tau(tau);
    const int others = cfg.n_stations - 1;
    if (others < cfg.mpr_capability) return 0.0; // fewer contenders than the channel resolves
    double ok = 0.0;
    for (int k = 0; k < cfg.mpr_capability; ++k) ok += binomial_pmf(others, k, tau);
    return std::clamp(1.0 - ok, 0.0, 1.0);
}

double poisson_attempt_prob(double eta, int k) {
    if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
    if (k < 0) throw std::invalid_argument("k must be >= 0");
    if (eta == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(eta) - eta - std::lgamma(k + 1.0));
}

} // namespace ebwlan
