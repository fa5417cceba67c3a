#pragma once

#include "ebwlan/capacity.hpp"
#include "ebwlan/sim.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ebwlan {

struct SimSettings {
    double duration_s = 1000.0;
    double warmup_s = 0.0;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> queue_capacity; // unset = unbounded
    int n_runs = 1;
    std::string trace_path; // per-packet CSV when non-empty

    bool operator==(const SimSettings&) const = default;
};

struct OptimizeSettings {
    CapacityTarget target = CapacityTarget::SBMD;
    double r_max = 64.0;
    PoissonSumLimit sum_limit = PoissonSumLimit::MminusOne;
    int m_min = 1;
    int m_max = 1;

    bool operator==(const OptimizeSettings&) const = default;
};

struct SweepSettings {
    std::string op = "saturate"; // saturate | delay | capacity | optimize
    std::vector<AccessMode> modes;
    std::vector<int> n_stations;
    std::vector<int> mpr_capability;
    std::vector<double> backoff_factor;
    std::vector<double> arrival_rate;

    bool operator==(const SweepSettings&) const = default;
};

/// One fully resolved run configuration: the flat sectioned key-value file,
/// after preset expansion and --set overrides.
struct RunConfig {
    NetworkConfig net;
    PhyParams phy;
    SimSettings sim;
    OptimizeSettings optimize;
    SweepSettings sweep;

    bool operator==(const RunConfig&) const = default;
};

/// Parse the sectioned key-value format:
///   [net]
///   n_stations = 50
///   ...
/// `phy.preset = table1|unit` expands before the remaining phy keys apply.
/// Unknown keys or malformed lines throw std::invalid_argument with the line
/// number. `base` supplies the starting values.
RunConfig parse_config_text(const std::string& text, const RunConfig& base = {});

RunConfig load_config_file(const std::string& path, const RunConfig& base = {});

/// Apply one dotted override, e.g. "net.arrival_rate=12.5".
void apply_override(RunConfig& cfg, const std::string& key_eq_value);

/// Canonical serialization: every key, fixed order, %.17g floats, so
/// parse(serialize(c)) == c exactly.
std::string serialize_config(const RunConfig& cfg);

/// Resolve a named preset: "table1" and "unit" are built in; anything else is
/// looked up as <name>.conf in EBWLAN_PRESET_DIR.
void apply_preset(RunConfig& cfg, const std::string& name);

} // namespace ebwlan
