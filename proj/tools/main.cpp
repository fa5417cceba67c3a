#include "ebwlan/config.hpp"
#include "ebwlan/vacation_queue.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

using json = nlohmann::json;
using namespace ebwlan;

namespace {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

json config_to_json(const RunConfig& cfg) {
    json j;
    j["net"] = {
        {"n_stations", cfg.net.n_stations},
        {"mpr_capability", cfg.net.mpr_capability},
        {"backoff_factor", cfg.net.backoff_factor},
        {"min_window", cfg.net.min_window},
        {"arrival_rate", cfg.net.arrival_rate},
        {"payload_bits", cfg.net.payload_bits},
        {"access_mode", to_string(cfg.net.access_mode)},
    };
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j["phy"] = {
        {"phy_header_s", cfg.phy.phy_header_s},
        {"mac_header_bits", cfg.phy.mac_header_bits},
        {"data_rate_bps", cfg.phy.data_rate_bps},
        {"sifs_s", cfg.phy.sifs_s},
        {"difs_s", cfg.phy.difs_s},
        {"ack_s", opt(cfg.phy.ack_s)},
        {"rts_s", opt(cfg.phy.rts_s)},
        {"cts_s", opt(cfg.phy.cts_s)},
        {"idle_slot_s", cfg.phy.idle_slot_s},
        {"prop_delay_s", cfg.phy.prop_delay_s},
    };
    j["sim"] = {
        {"duration_s", cfg.sim.duration_s},
        {"warmup_s", cfg.sim.warmup_s},
        {"seed", cfg.sim.seed},
        {"queue_capacity",
         cfg.sim.queue_capacity ? json(*cfg.sim.queue_capacity) : json("unbounded")},
        {"n_runs", cfg.sim.n_runs},
        {"trace_path", cfg.sim.trace_path},
    };
    j["optimize"] = {
        {"target", cfg.optimize.target == CapacityTarget::SBMD ? "sbmd" : "sbdj"},
        {"r_max", cfg.optimize.r_max},
        {"sum_limit", cfg.optimize.sum_limit == PoissonSumLimit::MminusOne ? "m_minus_1" : "m"},
        {"m_min", cfg.optimize.m_min},
        {"m_max", cfg.optimize.m_max},
    };
    return j;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

// CSV output carries the full resolved config as '# '-prefixed header lines;
// stripping that prefix yields a parseable config again.
void write_table(const Table& table, const RunConfig& cfg, const std::string& command,
                 const std::string& out_path, bool json_format) {
    std::ostringstream body;
    if (json_format) {
        json doc;
        doc["command"] = command;
        doc["config"] = config_to_json(cfg);
        doc["columns"] = table.columns;
        json rows = json::array();
        for (const auto& row : table.rows) {
            json obj;
            for (std::size_t i = 0; i < table.columns.size(); ++i)
                obj[table.columns[i]] = i < row.size() ? row[i] : json(nullptr);
            rows.push_back(std::move(obj));
        }
        doc["rows"] = std::move(rows);
        body << doc.dump(2) << "\n";
    } else {
        body << "## ebwlan " << command << "\n";
        std::istringstream header(serialize_config(cfg));
        std::string line;
        while (std::getline(header, line)) body << "# " << line << "\n";
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            body << (i ? "," : "") << table.columns[i];
        body << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                body << (i ? "," : "") << csv_cell(row[i]);
            body << "\n";
        }
    }
    write_text(out_path, body.str());
}

json opt_cell(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---- per-subcommand row builders ---------------------------------------

const std::vector<std::string> kSaturateCols = {
    "N", "M", "r", "W0", "mode", "tau_s", "p_c", "S_s_bits_per_s", "S_s_pkts_per_s"};

std::vector<json> saturate_row(const RunConfig& cfg) {
    const SlotTimes st = slot_times(cfg.net.access_mode, cfg.phy, cfg.net.payload_bits);
    const SaturationPoint sat = solve_saturation(cfg.net, st);
    return {cfg.net.n_stations, cfg.net.mpr_capability, cfg.net.backoff_factor,
            cfg.net.min_window, to_string(cfg.net.access_mode), sat.tau_s, sat.p_c,
            sat.s_s_bps, sat.s_s_bps / cfg.net.payload_bits};
}

const std::vector<std::string> kRootsCols = {
    "N", "M", "r", "mode", "offered_load_bps", "tau_l", "tau_r", "tau_star",
    "S_star_bps", "tau_s", "case", "tau_l_operating", "tau_r_operating"};

std::vector<json> roots_row(const RunConfig& cfg) {
    const SlotTimes st = slot_times(cfg.net.access_mode, cfg.phy, cfg.net.payload_bits);
    const OperatingPoints op = offered_load_roots(cfg.net, st);
    json rel = nullptr;
    if (op.relationship) {
        switch (*op.relationship) {
        case LoadCase::CaseI: rel = "i"; break;
        case LoadCase::CaseII: rel = "ii"; break;
        case LoadCase::CaseIII: rel = "iii"; break;
        }
    }
    return {cfg.net.n_stations, cfg.net.mpr_capability, cfg.net.backoff_factor,
            to_string(cfg.net.access_mode), op.offered_load_bps, opt_cell(op.tau_l),
            opt_cell(op.tau_r), op.tau_star, op.s_star, op.tau_s, rel,
            op.tau_l_operating, op.tau_r_operating};
}

const std::vector<std::string> kDelayCols = {
    "branch", "tau", "p_c", "rho_tilde", "rho", "m1_s", "ey_s", "mean_delay_s",
    "delay_std_s", "stable", "bounded_mean", "bounded_jitter", "verdict_scope"};

std::vector<std::vector<json>> delay_rows(const RunConfig& cfg) {
    const SlotTimes st = slot_times(cfg.net.access_mode, cfg.phy, cfg.net.payload_bits);
    const OperatingPoints op = offered_load_roots(cfg.net, st);

    std::vector<std::pair<std::string, double>> branches;
    if (op.tau_l && op.tau_l_operating) branches.emplace_back("low", *op.tau_l);
    if (op.tau_r && op.tau_r_operating) branches.emplace_back("high", *op.tau_r);
    if (branches.empty())
        throw SolverError("no operating point sustains the offered load");

    std::vector<std::vector<json>> rows;
    for (const auto& [name, tau] : branches) {
        const DelayStats ds = analyze_delay_at_tau(cfg.net, st, tau);
        rows.push_back({name, tau, ds.p_c, ds.rho_tilde, ds.rho, opt_cell(ds.service.m1),
                        ds.ey, opt_cell(ds.mean_delay_s),
                        ds.jitter_var_s2 ? json(std::sqrt(*ds.jitter_var_s2)) : json(nullptr),
                        ds.verdict.stable, ds.verdict.bounded_mean, ds.verdict.bounded_jitter,
                        "large_n_exact"});
    }
    return rows;
}

const std::vector<std::string> kCapacityCols = {
    "M", "mode", "r", "tau_bbmd", "tau_bbdj", "tau_s", "tau_star", "S_bbmd",
    "S_bbdj", "S_s", "S_star", "S_sbmd", "S_sbdj", "scenario"};

std::vector<json> capacity_row(const RunConfig& cfg) {
    const SlotTimes st = slot_times(cfg.net.access_mode, cfg.phy, cfg.net.payload_bits);
    const CapacityReport rep = capacity_report(cfg.net, st);
    return {cfg.net.mpr_capability, to_string(cfg.net.access_mode), cfg.net.backoff_factor,
            rep.tau_bbmd, rep.tau_bbdj, rep.tau_s, rep.tau_star, rep.s_bbmd, rep.s_bbdj,
            rep.s_s, rep.s_star, rep.s_sbmd, rep.s_sbdj, to_string(rep.scenario)};
}

const std::vector<std::string> kOptimizeCols = {
    "M", "mode", "target", "r_star", "S_star_bps", "S_star_per_M",
    "S_star_alt_limit_bps", "exact_finite_n"};

std::vector<std::vector<json>> optimize_rows(const RunConfig& cfg) {
    std::vector<std::vector<json>> rows;
    for (int m = cfg.optimize.m_min; m <= cfg.optimize.m_max; ++m) {
        const OptimalBackoff ob = optimal_backoff_factor(
            m, cfg.net.access_mode, cfg.phy, cfg.net.payload_bits, cfg.optimize.target,
            cfg.optimize.r_max, cfg.optimize.sum_limit);
        rows.push_back({m, to_string(cfg.net.access_mode),
                        cfg.optimize.target == CapacityTarget::SBMD ? "sbmd" : "sbdj",
                        ob.r_star, ob.s_star_bps, ob.s_star_bps / m, ob.s_star_alt_bps,
                        ob.exact_finite_n});
    }
    return rows;
}

json sim_stats_json(const SimStats& s) {
    return {
        {"throughput_pkts_per_s", s.throughput_pkts_per_s},
        {"throughput_bits_per_s", s.throughput_bits_per_s},
        {"mean_delay_s", s.mean_delay_s},
        {"delay_std_s", s.delay_std_s},
        {"delay_ci95_halfwidth_s", s.delay_ci95_halfwidth_s},
        {"mean_service_s", s.mean_service_s},
        {"mean_queue_len", s.mean_queue_len},
        {"delivered", s.delivered},
        {"measured_tau", measured_tau(s)},
        {"idle_slots", s.idle_slots},
        {"collided_slots", s.collided_slots},
        {"success_slots", s.success_slots},
        {"total_slots", s.total_slots},
        {"attempts", s.attempts},
        {"measured_duration_s", s.measured_duration_s},
        {"total_arrivals", s.total_arrivals},
        {"total_departures", s.total_departures},
        {"final_backlog", s.final_backlog},
        {"dropped", s.dropped},
        {"window_cap_hits", s.window_cap_hits},
        {"windows_rounded", s.windows_rounded},
    };
}

void write_trace_csv(const std::string& path, const SimStats& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace file: " + path);
    out << "arrival_s,hol_s,departure_s,retries\n";
    char buf[128];
    for (const auto& t : s.trace) {
        std::snprintf(buf, sizeof(buf), "%.9f,%.9f,%.9f,%d\n", t.arrival_s, t.hol_s,
                      t.departure_s, t.retries);
        out << buf;
    }
}

int run_simulate(const RunConfig& cfg, const std::string& out_path, bool json_format) {
    SimConfig sc;
    sc.net = cfg.net;
    sc.st = slot_times(cfg.net.access_mode, cfg.phy, cfg.net.payload_bits);
    sc.duration_s = cfg.sim.duration_s;
    sc.warmup_s = cfg.sim.warmup_s;
    sc.seed = cfg.sim.seed;
    sc.queue_capacity = cfg.sim.queue_capacity;
    sc.collect_trace = !cfg.sim.trace_path.empty() && cfg.sim.n_runs == 1;

    json doc;
    doc["command"] = "simulate";
    doc["config"] = config_to_json(cfg);

    Table table;
    table.columns = {"run", "throughput_pkts_per_s", "mean_delay_s", "delay_std_s",
                     "mean_service_s", "measured_tau", "delivered"};

    if (cfg.sim.n_runs <= 1) {
        const SimStats s = run_simulation(sc);
        doc["stats"] = sim_stats_json(s);
        if (sc.collect_trace) write_trace_csv(cfg.sim.trace_path, s);
        table.rows.push_back({0, s.throughput_pkts_per_s, s.mean_delay_s, s.delay_std_s,
                              s.mean_service_s, measured_tau(s), s.delivered});
    } else {
        const ReplicationStats rep = replicate(sc, cfg.sim.n_runs);
        json runs = json::array();
        for (std::size_t i = 0; i < rep.runs.size(); ++i) {
            const SimStats& s = rep.runs[i];
            runs.push_back(sim_stats_json(s));
            table.rows.push_back({static_cast<int>(i), s.throughput_pkts_per_s, s.mean_delay_s,
                                  s.delay_std_s, s.mean_service_s, measured_tau(s), s.delivered});
        }
        doc["runs"] = std::move(runs);
        doc["aggregate"] = {
            {"mean_delay_s", rep.mean_delay_s},
            {"mean_delay_ci95_s", rep.mean_delay_ci95_s},
            {"throughput_pkts_per_s", rep.throughput_pkts_per_s},
            {"throughput_ci95", rep.throughput_ci95},
            {"mean_service_s", rep.mean_service_s},
            {"delay_spread_s", rep.delay_spread_s},
            {"within_run_ci_s", rep.within_run_ci_s},
            {"nonconverged", rep.nonconverged},
        };
    }

    if (json_format) {
        write_text(out_path, doc.dump(2) + "\n");
    } else {
        write_table(table, cfg, "simulate", out_path, false);
    }
    return 0;
}

// ---- sweep --------------------------------------------------------------

int run_sweep(const RunConfig& cfg, const std::string& out_path, bool json_format) {
    const SweepSettings& sw = cfg.sweep;
    auto modes = sw.modes.empty() ? std::vector<AccessMode>{cfg.net.access_mode} : sw.modes;
    auto ns = sw.n_stations.empty() ? std::vector<int>{cfg.net.n_stations} : sw.n_stations;
    auto ms = sw.mpr_capability.empty() ? std::vector<int>{cfg.net.mpr_capability}
                                        : sw.mpr_capability;
    auto rs = sw.backoff_factor.empty() ? std::vector<double>{cfg.net.backoff_factor}
                                        : sw.backoff_factor;
    auto lambdas = sw.arrival_rate.empty() ? std::vector<double>{cfg.net.arrival_rate}
                                           : sw.arrival_rate;

    struct Point {
        RunConfig cfg;
        std::vector<json> axis_cells;
    };
    std::vector<Point> points;
    for (auto mode : modes)
        for (int n : ns)
            for (int m : ms)
                for (double r : rs)
                    for (double lam : lambdas) {
                        Point p;
                        p.cfg = cfg;
                        p.cfg.net.access_mode = mode;
                        p.cfg.net.n_stations = n;
                        p.cfg.net.mpr_capability = m;
                        p.cfg.net.backoff_factor = r;
                        p.cfg.net.arrival_rate = lam;
                        if (sw.op == "optimize") {
                            p.cfg.optimize.m_min = m;
                            p.cfg.optimize.m_max = m;
                        }
                        p.axis_cells = {to_string(mode), n, m, r, lam};
                        points.push_back(std::move(p));
                    }

    std::vector<std::string> op_cols;
    if (sw.op == "saturate") op_cols = kSaturateCols;
    else if (sw.op == "delay") op_cols = kDelayCols;
    else if (sw.op == "capacity") op_cols = kCapacityCols;
    else op_cols = kOptimizeCols;

    Table table;
    table.columns = {"mode", "N", "M", "r", "lambda"};
    table.columns.insert(table.columns.end(), op_cols.begin(), op_cols.end());
    table.columns.push_back("error");

    const std::size_t n_op_cols = op_cols.size();
    const std::string op = sw.op;

    std::vector<std::future<std::vector<std::vector<json>>>> futures;
    futures.reserve(points.size());
    for (const auto& p : points) {
        RunConfig point_cfg = p.cfg;
        futures.push_back(std::async(std::launch::async, [op, n_op_cols, point_cfg]() {
            std::vector<std::vector<json>> rows;
            try {
                if (op == "saturate") rows.push_back(saturate_row(point_cfg));
                else if (op == "delay") rows = delay_rows(point_cfg);
                else if (op == "capacity") rows.push_back(capacity_row(point_cfg));
                else rows = optimize_rows(point_cfg);
                for (auto& r : rows) r.push_back(json(nullptr)); // empty error cell
            } catch (const std::exception& e) {
                std::vector<json> err_row(n_op_cols, json(nullptr));
                err_row.push_back(e.what());
                rows.clear();
                rows.push_back(std::move(err_row));
            }
            return rows;
        }));
    }

    bool any_error = false;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        auto rows = futures[i].get();
        for (auto& row : rows) {
            std::vector<json> full = points[i].axis_cells;
            full.insert(full.end(), row.begin(), row.end());
            if (!full.back().is_null()) any_error = true;
            table.rows.push_back(std::move(full));
        }
    }

    write_table(table, cfg, "sweep", out_path, json_format);
    return any_error ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytical performance engine and discrete-event simulator for "
                 "exponential-backoff WLAN MAC with multi-packet reception"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", trace_path;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (sectioned key = value)");
        sub->add_option("--out", out_path, "output path; stdout when omitted or '-'");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--set", overrides, "override, e.g. net.arrival_rate=12.5")->take_all();
        return sub;
    };

    auto* cmd_saturate = add_common(app.add_subcommand("saturate", "saturation fixed point"));
    auto* cmd_roots = add_common(app.add_subcommand("roots", "offered-load operating points"));
    auto* cmd_delay = add_common(app.add_subcommand("delay", "delay statistics at the operating point"));
    auto* cmd_capacity = add_common(app.add_subcommand("capacity", "boundary and safe throughputs"));
    auto* cmd_optimize = add_common(app.add_subcommand("optimize", "optimal backoff factor (large N)"));
    auto* cmd_simulate = add_common(app.add_subcommand("simulate", "slot-level simulation"));
    cmd_simulate->add_option("--trace", trace_path, "per-packet trace CSV path");
    auto* cmd_sweep = add_common(app.add_subcommand("sweep", "cross config axes, run an op per point"));

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        for (const auto& kv : overrides) apply_override(cfg, kv);
        if (!trace_path.empty()) cfg.sim.trace_path = trace_path;
        const bool json_format = format == "json";

        Table table;
        if (cmd_saturate->parsed()) {
            table.columns = kSaturateCols;
            table.rows.push_back(saturate_row(cfg));
            write_table(table, cfg, "saturate", out_path, json_format);
        } else if (cmd_roots->parsed()) {
            table.columns = kRootsCols;
            table.rows.push_back(roots_row(cfg));
            write_table(table, cfg, "roots", out_path, json_format);
        } else if (cmd_delay->parsed()) {
            table.columns = kDelayCols;
            table.rows = delay_rows(cfg);
            write_table(table, cfg, "delay", out_path, json_format);
        } else if (cmd_capacity->parsed()) {
            table.columns = kCapacityCols;
            table.rows.push_back(capacity_row(cfg));
            write_table(table, cfg, "capacity", out_path, json_format);
        } else if (cmd_optimize->parsed()) {
            table.columns = kOptimizeCols;
            table.rows = optimize_rows(cfg);
            write_table(table, cfg, "optimize", out_path, json_format);
        } else if (cmd_simulate->parsed()) {
            return run_simulate(cfg, out_path, json_format);
        } else if (cmd_sweep->parsed()) {
            return run_sweep(cfg, out_path, json_format);
        }
        return 0;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const UnstableSystem& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
