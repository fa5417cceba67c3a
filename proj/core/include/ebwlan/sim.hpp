#pragma once

#include "ebwlan/contention.hpp"
#include "ebwlan/phy_timing.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ebwlan {

struct SimConfig {
    NetworkConfig net;
    SlotTimes st;
    double duration_s = 0.0; // simulated-time horizon (slot starts beyond it stop the run)
    double warmup_s = 0.0;   // slots starting before this are excluded from statistics
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> queue_capacity; // packets per station incl. HOL; unbounded if unset
    bool collect_trace = false;                  // per-packet records (arrival/hol/departure/retries)

    void validate() const;
};

struct TraceRecord {
    double arrival_s = 0.0;
    double hol_s = 0.0; // instant backoff became possible (slot boundary)
    double departure_s = 0.0;
    int retries = 0; // transmission attempts, >= 1
};

struct SimStats {
    int n_stations = 0;
    double throughput_pkts_per_s = 0.0;
    double throughput_bits_per_s = 0.0;
    double mean_delay_s = 0.0;  // arrival -> departure
    double delay_std_s = 0.0;
    double mean_service_s = 0.0; // backoff start -> departure (the X_ne quantity)
    double mean_queue_len = 0.0; // time-averaged packets in system per station
    std::uint64_t delivered = 0; // departures inside the measurement window

    std::uint64_t idle_slots = 0;
    std::uint64_t collided_slots = 0;
    std::uint64_t success_slots = 0;
    std::uint64_t total_slots = 0;
    std::uint64_t attempts = 0; // station-transmissions inside the window
    double measured_duration_s = 0.0;
    double measure_start_s = 0.0;
    double end_time_s = 0.0;

    // conservation over the whole run (warmup included)
    std::uint64_t total_arrivals = 0;
    std::uint64_t total_departures = 0;
    std::uint64_t final_backlog = 0;
    std::uint64_t dropped = 0;
    std::vector<std::uint64_t> station_arrivals;
    std::vector<std::uint64_t> station_departures;
    std::vector<std::uint64_t> station_backlog;

    std::uint64_t window_cap_hits = 0;
    // true when a backoff window r^stage * W0 was not an integer and had to
    // be rounded; the analytical moments use the real-valued window, so the
    // two sides differ slightly wherever this is set
    bool windows_rounded = false;
    std::vector<std::uint64_t> retry_histogram; // [j-1] = packets delivered on attempt j

    double delay_ci95_halfwidth_s = 0.0; // 1.96 sd/sqrt(n) within this run

    std::vector<TraceRecord> trace;
};

/// Slot-synchronous simulation of N stations with Poisson arrivals,
/// exponential backoff and an M-packet reception channel. Deterministic:
/// the same SimConfig (seed included) reproduces the stats bit for bit.
SimStats run_simulation(const SimConfig& cfg);

/// attempts / (N * slots): the empirical per-station per-slot transmission
/// probability, comparable to the analytical tau.
double measured_tau(const SimStats& stats);

struct ReplicationStats {
    std::vector<SimStats> runs;
    double mean_delay_s = 0.0;          // average of per-run means
    double mean_delay_ci95_s = 0.0;     // between-run 95% CI half-width
    double throughput_pkts_per_s = 0.0;
    double throughput_ci95 = 0.0;
    double mean_service_s = 0.0;
    double delay_spread_s = 0.0;        // max - min of per-run mean delays
    double within_run_ci_s = 0.0;       // average per-run CI half-width
    bool nonconverged = false;          // spread > 3x within-run CI
};

/// n_runs independent replications (seeds drawn from a splitmix64 stream over
/// cfg.seed), executed concurrently, aggregated in run order.
ReplicationStats replicate(const SimConfig& cfg, int n_runs);

} // namespace ebwlan
