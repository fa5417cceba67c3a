#include "ebwlan/sim.hpp"

#include "ebwlan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <vector>

namespace ebwlan {

void SimConfig::validate() const {
    net.validate();
    if (!(duration_s > warmup_s) || warmup_s < 0.0)
        throw std::invalid_argument("need duration_s > warmup_s >= 0");
    if (!(st.t_idle > 0.0 && st.t_coll > 0.0 && st.t_succ > 0.0))
        throw std::invalid_argument("slot times must be positive");
    if (queue_capacity && *queue_capacity < 1)
        throw std::invalid_argument("queue_capacity must be >= 1 when set");
}

namespace {

constexpr std::uint64_t kWindowCap = std::uint64_t{1} << 31;

struct Station {
    std::deque<double> queue; // arrival times; front is the HOL packet
    double next_arrival = 0.0;
    Xoshiro256ss rng;
    std::int64_t counter = -1; // backoff counter; -1 when no packet is in backoff
    int stage = 0;             // failures of the current HOL so far
    double hol_ready = 0.0;    // when the current HOL could start backoff
};

struct Welford {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
};

} // namespace

SimStats run_simulation(const SimConfig& cfg) {
    cfg.validate();
    const int n = cfg.net.n_stations;
    const int m = cfg.net.mpr_capability;
    const double r = cfg.net.backoff_factor;
    const double w0 = cfg.net.min_window;
    const double lambda = cfg.net.arrival_rate;

    SimStats stats;
    stats.n_stations = n;
    stats.station_arrivals.assign(n, 0);
    stats.station_departures.assign(n, 0);
    stats.station_backlog.assign(n, 0);

    std::vector<Station> stations;
    stations.reserve(n);
    for (int i = 0; i < n; ++i) {
        Station s;
        s.rng = Xoshiro256ss(cfg.seed, static_cast<std::uint64_t>(i));
        s.next_arrival = lambda > 0.0 ? s.rng.exponential(lambda)
                                      : std::numeric_limits<double>::infinity();
        stations.push_back(std::move(s));
    }

    auto draw_counter = [&](Station& s) {
        const double w_exact = std::pow(r, s.stage) * w0;
        const double w_real = std::round(w_exact);
        if (w_real != w_exact) stats.windows_rounded = true;
        std::uint64_t w;
        if (!(w_real < static_cast<double>(kWindowCap))) {
            w = kWindowCap;
            ++stats.window_cap_hits;
        } else {
            w = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(w_real));
        }
        s.counter = static_cast<std::int64_t>(s.rng.below(w));
    };

    std::vector<int> transmitters;
    transmitters.reserve(n);

    Welford delay_acc, service_acc;
    double qlen_integral = 0.0;
    std::uint64_t in_system = 0;

    double t = 0.0;
    bool measuring = false;
    double measure_start = 0.0;

    while (t < cfg.duration_s) {
        if (!measuring && t >= cfg.warmup_s) {
            measuring = true;
            measure_start = t;
        }

        transmitters.clear();
        for (int i = 0; i < n; ++i)
            if (stations[i].counter == 0) transmitters.push_back(i);

        const int n_tx = static_cast<int>(transmitters.size());
        const bool success = n_tx >= 1 && n_tx <= m;
        const double dt = n_tx == 0 ? cfg.st.t_idle : success ? cfg.st.t_succ : cfg.st.t_coll;
        const double t_end = t + dt;

        if (measuring) {
            ++stats.total_slots;
            if (n_tx == 0) ++stats.idle_slots;
            else if (success) ++stats.success_slots;
            else ++stats.collided_slots;
            stats.attempts += n_tx;
            qlen_integral += dt * static_cast<double>(in_system);
        }

        // countdown first: it touches only non-transmitters (counter > 0), so
        // counters redrawn by this slot's transmitters start from the next slot
        for (int i = 0; i < n; ++i) {
            Station& s = stations[i];
            if (s.counter > 0) --s.counter;
        }

        // outcome for the transmitting stations
        for (int idx : transmitters) {
            Station& s = stations[idx];
            if (success) {
                const double arrival = s.queue.front();
                s.queue.pop_front();
                --in_system;
                ++stats.total_departures;
                ++stats.station_departures[idx];
                const int retries = s.stage + 1;
                if (measuring) {
                    ++stats.delivered;
                    delay_acc.add(t_end - arrival);
                    service_acc.add(t_end - s.hol_ready);
                    if (static_cast<std::size_t>(retries) > stats.retry_histogram.size())
                        stats.retry_histogram.resize(retries, 0);
                    ++stats.retry_histogram[retries - 1];
                    if (cfg.collect_trace)
                        stats.trace.push_back({arrival, s.hol_ready, t_end, retries});
                }
                if (!s.queue.empty()) {
                    s.stage = 0;
                    s.hol_ready = t_end;
                    draw_counter(s);
                } else {
                    s.counter = -1;
                    s.stage = 0;
                }
            } else { // collision: grow the window, redraw
                ++s.stage;
                draw_counter(s);
            }
        }

        // arrivals in (t, t_end] join at the slot boundary
        if (lambda > 0.0) {
            for (int i = 0; i < n; ++i) {
                Station& s = stations[i];
                while (s.next_arrival <= t_end) {
                    ++stats.total_arrivals;
                    ++stats.station_arrivals[i];
                    if (cfg.queue_capacity && s.queue.size() >= *cfg.queue_capacity) {
                        ++stats.dropped;
                    } else {
                        s.queue.push_back(s.next_arrival);
                        ++in_system;
                        if (measuring) qlen_integral += t_end - std::max(s.next_arrival, t);
                    }
                    s.next_arrival += s.rng.exponential(lambda);
                }
                if (s.counter < 0 && !s.queue.empty()) {
                    s.stage = 0;
                    s.hol_ready = t_end;
                    draw_counter(s);
                }
            }
        }

        t = t_end;
    }

    stats.end_time_s = t;
    if (!measuring) measure_start = t;
    stats.measure_start_s = measure_start;
    stats.measured_duration_s = t - measure_start;
    stats.final_backlog = in_system;
    for (int i = 0; i < n; ++i) stats.station_backlog[i] = stations[i].queue.size();

    const double window = stats.measured_duration_s;
    if (window > 0.0 && stats.delivered > 0) {
        stats.throughput_pkts_per_s = static_cast<double>(stats.delivered) / window;
        stats.throughput_bits_per_s = stats.throughput_pkts_per_s * cfg.net.payload_bits;
        stats.mean_delay_s = delay_acc.mean;
        stats.delay_std_s = delay_acc.stddev();
        stats.mean_service_s = service_acc.mean;
        stats.delay_ci95_halfwidth_s =
            1.96 * delay_acc.stddev() / std::sqrt(static_cast<double>(delay_acc.n));
    }
    if (window > 0.0) stats.mean_queue_len = qlen_integral / window / n;
    return stats;
}

double measured_tau(const SimStats& stats) {
    if (stats.total_slots == 0) return 0.0;
    return static_cast<double>(stats.attempts)
         / (static_cast<double>(stats.n_stations) * static_cast<double>(stats.total_slots));
}

ReplicationStats replicate(const SimConfig& cfg, int n_runs) {
    if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");

    SplitMix64 seed_stream(cfg.seed);
    std::vector<std::uint64_t> seeds;
    seeds.reserve(n_runs);
    for (int i = 0; i < n_runs; ++i) seeds.push_back(seed_stream.next());

    std::vector<std::future<SimStats>> futures;
    futures.reserve(n_runs);
    for (int i = 0; i < n_runs; ++i) {
        SimConfig run_cfg = cfg;
        run_cfg.seed = seeds[i];
        futures.push_back(std::async(std::launch::async,
                                     [run_cfg]() { return run_simulation(run_cfg); }));
    }

    ReplicationStats out;
    out.runs.reserve(n_runs);
    for (auto& f : futures) out.runs.push_back(f.get());

    Welford delay_means, thr_means;
    double min_mean = std::numeric_limits<double>::infinity();
    double max_mean = -std::numeric_limits<double>::infinity();
    double within = 0.0, service = 0.0;
    for (const SimStats& s : out.runs) {
        delay_means.add(s.mean_delay_s);
        thr_means.add(s.throughput_pkts_per_s);
        min_mean = std::min(min_mean, s.mean_delay_s);
        max_mean = std::max(max_mean, s.mean_delay_s);
        within += s.delay_ci95_halfwidth_s;
        service += s.mean_service_s;
    }
    within /= n_runs;
    out.mean_delay_s = delay_means.mean;
    out.throughput_pkts_per_s = thr_means.mean;
    out.mean_service_s = service / n_runs;
    if (n_runs > 1) {
        out.mean_delay_ci95_s = 1.96 * delay_means.stddev() / std::sqrt(double(n_runs));
        out.throughput_ci95 = 1.96 * thr_means.stddev() / std::sqrt(double(n_runs));
    }
    out.delay_spread_s = n_runs > 1 ? max_mean - min_mean : 0.0;
    out.within_run_ci_s = within;
    out.nonconverged = n_runs > 1 && out.delay_spread_s > 3.0 * within;
    return out;
}

} // namespace ebwlan
