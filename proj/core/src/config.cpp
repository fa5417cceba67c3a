#include "ebwlan/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ebwlan {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(where + ": not a number: '" + v + "'");
    }
}

long long parse_int(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(where + ": not an integer: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(where + ": not an unsigned integer: '" + v + "'");
    }
}

std::optional<double> parse_opt_double(const std::string& v, const std::string& where) {
    if (v == "unset") return std::nullopt;
    return parse_double(v, where);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string token;
    for (char ch : v + " ") {
        if (ch == ' ' || ch == '\t' || ch == ',') {
            if (!token.empty()) out.push_back(token);
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "unset"; }

void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value, const std::string& where, int depth);

void apply_preset_impl(RunConfig& cfg, const std::string& name, int depth) {
    if (depth > 8) throw std::invalid_argument("preset nesting too deep");
    if (name == "table1") {
        cfg.phy = table1_phy();
        return;
    }
    if (name == "unit") {
        cfg.phy = unit_phy();
        return;
    }
    const char* dir = std::getenv("EBWLAN_PRESET_DIR");
    if (!dir)
        throw std::invalid_argument("unknown preset '" + name
                                    + "' and EBWLAN_PRESET_DIR is not set");
    const std::string path = std::string(dir) + "/" + name + ".conf";
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("preset file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    // inline re-parse into the current config
    std::string section;
    std::string line;
    int line_no = 0;
    std::istringstream text(ss.str());
    while (std::getline(text, line)) {
        ++line_no;
        const std::string where = path + ":" + std::to_string(line_no);
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw std::invalid_argument(where + ": malformed section");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key = value");
        set_key(cfg, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), where, depth + 1);
    }
}

void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value, const std::string& where, int depth) {
    if (section == "net") {
        if (key == "n_stations") cfg.net.n_stations = static_cast<int>(parse_int(value, where));
        else if (key == "mpr_capability") cfg.net.mpr_capability = static_cast<int>(parse_int(value, where));
        else if (key == "backoff_factor") cfg.net.backoff_factor = parse_double(value, where);
        else if (key == "min_window") cfg.net.min_window = static_cast<int>(parse_int(value, where));
        else if (key == "arrival_rate") cfg.net.arrival_rate = parse_double(value, where);
        else if (key == "payload_bits") cfg.net.payload_bits = parse_double(value, where);
        else if (key == "access_mode") cfg.net.access_mode = access_mode_from_string(value);
        else throw std::invalid_argument(where + ": unknown key net." + key);
    } else if (section == "phy") {
        if (key == "preset") apply_preset_impl(cfg, value, depth);
        else if (key == "phy_header_s") cfg.phy.phy_header_s = parse_double(value, where);
        else if (key == "mac_header_bits") cfg.phy.mac_header_bits = parse_double(value, where);
        else if (key == "data_rate_bps") cfg.phy.data_rate_bps = parse_double(value, where);
        else if (key == "sifs_s") cfg.phy.sifs_s = parse_double(value, where);
        else if (key == "difs_s") cfg.phy.difs_s = parse_double(value, where);
        else if (key == "ack_s") cfg.phy.ack_s = parse_opt_double(value, where);
        else if (key == "rts_s") cfg.phy.rts_s = parse_opt_double(value, where);
        else if (key == "cts_s") cfg.phy.cts_s = parse_opt_double(value, where);
        else if (key == "idle_slot_s") cfg.phy.idle_slot_s = parse_double(value, where);
        else if (key == "prop_delay_s") cfg.phy.prop_delay_s = parse_double(value, where);
        else throw std::invalid_argument(where + ": unknown key phy." + key);
    } else if (section == "sim") {
        if (key == "duration_s") cfg.sim.duration_s = parse_double(value, where);
        else if (key == "warmup_s") cfg.sim.warmup_s = parse_double(value, where);
        else if (key == "seed") cfg.sim.seed = parse_u64(value, where);
        else if (key == "queue_capacity") {
            if (value == "unbounded") cfg.sim.queue_capacity.reset();
            else cfg.sim.queue_capacity = parse_u64(value, where);
        }
        else if (key == "n_runs") cfg.sim.n_runs = static_cast<int>(parse_int(value, where));
        else if (key == "trace_path") cfg.sim.trace_path = value;
        else throw std::invalid_argument(where + ": unknown key sim." + key);
    } else if (section == "optimize") {
        if (key == "target") {
            if (value == "sbmd") cfg.optimize.target = CapacityTarget::SBMD;
            else if (value == "sbdj") cfg.optimize.target = CapacityTarget::SBDJ;
            else throw std::invalid_argument(where + ": target must be sbmd or sbdj");
        }
        else if (key == "r_max") cfg.optimize.r_max = parse_double(value, where);
        else if (key == "sum_limit") {
            if (value == "m_minus_1") cfg.optimize.sum_limit = PoissonSumLimit::MminusOne;
            else if (value == "m") cfg.optimize.sum_limit = PoissonSumLimit::M;
            else throw std::invalid_argument(where + ": sum_limit must be m_minus_1 or m");
        }
        else if (key == "m_min") cfg.optimize.m_min = static_cast<int>(parse_int(value, where));
        else if (key == "m_max") cfg.optimize.m_max = static_cast<int>(parse_int(value, where));
        else throw std::invalid_argument(where + ": unknown key optimize." + key);
    } else if (section == "sweep") {
        if (key == "op") {
            if (value != "saturate" && value != "delay" && value != "capacity" && value != "optimize")
                throw std::invalid_argument(where + ": sweep.op must be saturate|delay|capacity|optimize");
            cfg.sweep.op = value;
        } else if (key == "modes") {
            cfg.sweep.modes.clear();
            for (const auto& v : split_list(value)) cfg.sweep.modes.push_back(access_mode_from_string(v));
        } else if (key == "n_stations") {
            cfg.sweep.n_stations.clear();
            for (const auto& v : split_list(value))
                cfg.sweep.n_stations.push_back(static_cast<int>(parse_int(v, where)));
        } else if (key == "mpr_capability") {
            cfg.sweep.mpr_capability.clear();
            for (const auto& v : split_list(value))
                cfg.sweep.mpr_capability.push_back(static_cast<int>(parse_int(v, where)));
        } else if (key == "backoff_factor") {
            cfg.sweep.backoff_factor.clear();
            for (const auto& v : split_list(value))
                cfg.sweep.backoff_factor.push_back(parse_double(v, where));
        } else if (key == "arrival_rate") {
            cfg.sweep.arrival_rate.clear();
            for (const auto& v : split_list(value))
                cfg.sweep.arrival_rate.push_back(parse_double(v, where));
        } else {
            throw std::invalid_argument(where + ": unknown key sweep." + key);
        }
    } else {
        throw std::invalid_argument(where + ": unknown section [" + section + "]");
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text, const RunConfig& base) {
    RunConfig cfg = base;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = "line " + std::to_string(line_no);
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw std::invalid_argument(where + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(where + ": expected key = value");
        if (section.empty()) throw std::invalid_argument(where + ": key before any [section]");
        set_key(cfg, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), where, 0);
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), base);
}

void apply_override(RunConfig& cfg, const std::string& key_eq_value) {
    const auto eq = key_eq_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must look like section.key=value: " + key_eq_value);
    const std::string key = trim(key_eq_value.substr(0, eq));
    const std::string value = trim(key_eq_value.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos)
        throw std::invalid_argument("override key needs a section prefix: " + key);
    set_key(cfg, key.substr(0, dot), key.substr(dot + 1), value, "--set " + key, 0);
}

void apply_preset(RunConfig& cfg, const std::string& name) { apply_preset_impl(cfg, name, 0); }

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[net]\n";
    out << "n_stations = " << cfg.net.n_stations << "\n";
    out << "mpr_capability = " << cfg.net.mpr_capability << "\n";
    out << "backoff_factor = " << fmt(cfg.net.backoff_factor) << "\n";
    out << "min_window = " << cfg.net.min_window << "\n";
    out << "arrival_rate = " << fmt(cfg.net.arrival_rate) << "\n";
    out << "payload_bits = " << fmt(cfg.net.payload_bits) << "\n";
    out << "access_mode = " << to_string(cfg.net.access_mode) << "\n";
    out << "[phy]\n";
    out << "phy_header_s = " << fmt(cfg.phy.phy_header_s) << "\n";
    out << "mac_header_bits = " << fmt(cfg.phy.mac_header_bits) << "\n";
    out << "data_rate_bps = " << fmt(cfg.phy.data_rate_bps) << "\n";
    out << "sifs_s = " << fmt(cfg.phy.sifs_s) << "\n";
    out << "difs_s = " << fmt(cfg.phy.difs_s) << "\n";
    out << "ack_s = " << fmt(cfg.phy.ack_s) << "\n";
    out << "rts_s = " << fmt(cfg.phy.rts_s) << "\n";
    out << "cts_s = " << fmt(cfg.phy.cts_s) << "\n";
    out << "idle_slot_s = " << fmt(cfg.phy.idle_slot_s) << "\n";
    out << "prop_delay_s = " << fmt(cfg.phy.prop_delay_s) << "\n";
    out << "[sim]\n";
    out << "duration_s = " << fmt(cfg.sim.duration_s) << "\n";
    out << "warmup_s = " << fmt(cfg.sim.warmup_s) << "\n";
    out << "seed = " << cfg.sim.seed << "\n";
    out << "queue_capacity = "
        << (cfg.sim.queue_capacity ? std::to_string(*cfg.sim.queue_capacity) : "unbounded") << "\n";
    out << "n_runs = " << cfg.sim.n_runs << "\n";
    out << "trace_path = " << cfg.sim.trace_path << "\n";
    out << "[optimize]\n";
    out << "target = " << (cfg.optimize.target == CapacityTarget::SBMD ? "sbmd" : "sbdj") << "\n";
    out << "r_max = " << fmt(cfg.optimize.r_max) << "\n";
    out << "sum_limit = "
        << (cfg.optimize.sum_limit == PoissonSumLimit::MminusOne ? "m_minus_1" : "m") << "\n";
    out << "m_min = " << cfg.optimize.m_min << "\n";
    out << "m_max = " << cfg.optimize.m_max << "\n";
    out << "[sweep]\n";
    out << "op = " << cfg.sweep.op << "\n";
    out << "modes =";
    for (auto m : cfg.sweep.modes) out << " " << to_string(m);
    out << "\n";
    out << "n_stations =";
    for (auto v : cfg.sweep.n_stations) out << " " << v;
    out << "\n";
    out << "mpr_capability =";
    for (auto v : cfg.sweep.mpr_capability) out << " " << v;
    out << "\n";
    out << "backoff_factor =";
    for (auto v : cfg.sweep.backoff_factor) out << " " << fmt(v);
    out << "\n";
    out << "arrival_rate =";
    for (auto v : cfg.sweep.arrival_rate) out << " " << fmt(v);
    out << "\n";
    return out.str();
}

} // namespace ebwlan
