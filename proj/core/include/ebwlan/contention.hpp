#pragma once

#include "ebwlan/types.hpp"

namespace ebwlan {

/// Static description of the contending population.
///
/// tau (the average per-slot transmission probability) is not part of the
/// config: it is an argument of the probability functions below, since the
/// same network is evaluated at many operating points.
struct NetworkConfig {
    int n_stations = 1;          // N >= 1
    int mpr_capability = 1;      // M >= 1; M >= N means collisions are impossible
    double backoff_factor = 2.0; // r >= 1
    int min_window = 16;         // W0 >= 1
    double arrival_rate = 0.0;   // lambda, packets/s per station
    double payload_bits = 1.0;   // PL > 0
    AccessMode access_mode = AccessMode::SlottedAloha;

    void validate() const; // throws std::invalid_argument

    bool operator==(const NetworkConfig&) const = default;
};

enum class SlotView {
    Generic,     // as seen by an outside observer: N potential transmitters
    BackoffView, // as seen by a counting-down station: N-1 potential transmitters
};

/// One slot is idle, a success (1..M transmitters) or a collision (> M).
/// Components sum to 1.
struct SlotProbabilities {
    double p_idle = 1.0;
    double p_coll = 0.0;
    double p_succ = 0.0;
    SlotView view = SlotView::Generic;
};

/// Binomial pmf C(n,k) tau^k (1-tau)^(n-k), evaluated in log space so it
/// stays usable for n in the thousands.
double binomial_pmf(int n, int k, double tau);

SlotProbabilities generic_slot_probs(double tau, const NetworkConfig& cfg);
SlotProbabilities backoff_view_slot_probs(double tau, const NetworkConfig& cfg);

/// Pr{X = k}: exactly k of the N stations transmit in a generic slot.
double attempt_count_prob(double tau, const NetworkConfig& cfg, int k);

/// p_c: probability a transmitting station collides, i.e. at least M of the
/// other N-1 stations transmit in the same slot. Nondecreasing in tau.
double collision_prob_pc(double tau, const NetworkConfig& cfg);

/// eta^k e^(-eta) / k!, the large-N limit of attempt_count_prob at eta = N*tau.
double poisson_attempt_prob(double eta, int k);

} // namespace ebwlan
