#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "manetsim/simulation.hpp"

namespace manetsim {

// One CSV row per (scenario, seed) run: the full config echo followed by
// the metrics, in a fixed column order.
struct ResultRow {
    ScenarioConfig cfg;
    MetricsReport report;
    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t control_transmitted = 0;
    std::uint64_t control_received = 0;

    static std::string csv_header() {
        return "protocol,strategy,nodes,range_m,terrain_w,terrain_h,speed_max,rate_pps,"
               "payload_bytes,duration_s,adversary_fraction,w_deliberate_drop,w_black_hole,"
               "w_node_failure,w_link_failure,w_energy_depletion,tolerance,reward,penalty,"
               "reintegration_trust,max_second_chances,seed,pdr,overhead,overhead_conv,"
               "avg_delay,throughput,data_sent,data_delivered,control_transmitted,"
               "control_received";
    }

    std::string to_csv() const {
        std::ostringstream out;
        out << to_string(cfg.protocol) << ',' << to_string(cfg.strategy) << ',' << cfg.nodes
            << ',' << fmt(cfg.range_m) << ',' << fmt(cfg.terrain.width) << ','
            << fmt(cfg.terrain.height) << ',' << fmt(cfg.speed_max) << ',' << fmt(cfg.rate_pps)
            << ',' << cfg.payload_bytes << ',' << fmt(cfg.duration_s) << ','
            << fmt(cfg.adversary.fraction) << ',' << fmt(cfg.adversary.weights.deliberate_drop)
            << ',' << fmt(cfg.adversary.weights.black_hole) << ','
            << fmt(cfg.adversary.weights.node_failure) << ','
            << fmt(cfg.adversary.weights.link_failure) << ','
            << fmt(cfg.adversary.weights.energy_depletion) << ',' << fmt(cfg.trust.tolerance)
            << ',' << fmt(cfg.trust.reward) << ',' << fmt(cfg.trust.penalty) << ','
            << fmt(cfg.trust.reintegration_trust) << ',' << cfg.trust.max_second_chances << ','
            << cfg.seed << ',' << fmt(report.pdr) << ',' << fmt(report.overhead) << ','
            << fmt(report.overhead_conv) << ',' << fmt(report.avg_delay) << ','
            << fmt(report.throughput) << ',' << data_sent << ',' << data_delivered << ','
            << control_transmitted << ',' << control_received;
        return out.str();
    }

    static std::string fmt(double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return buf;
    }
    static std::string fmt(std::optional<double> v) { return v ? fmt(*v) : std::string{}; }
};

inline ResultRow run_scenario(const ScenarioConfig& cfg) {
    Simulation sim(cfg);
    sim.run();
    ResultRow row;
    row.cfg = cfg;
    row.report = sim.report();
    row.data_sent = sim.ledger().data_sent;
    row.data_delivered = sim.ledger().data_delivered;
    row.control_transmitted = sim.ledger().control_transmitted;
    row.control_received = sim.ledger().control_received;
    return row;
}

struct SweepSpec {
    ScenarioConfig base;
    std::vector<Protocol> protocols = {Protocol::Aodv, Protocol::Dsr};
    std::vector<Strategy> strategies = {Strategy::None, Strategy::Eliminate,
                                        Strategy::SecondChance};
    std::vector<int> node_counts = {30, 40, 50};
    std::vector<double> ranges = {150.0};
    std::vector<std::uint64_t> seeds = {1};
    unsigned jobs = 0;  // 0 = hardware concurrency
};

inline std::vector<ScenarioConfig> expand_grid(const SweepSpec& spec) {
    std::vector<ScenarioConfig> grid;
    for (Protocol p : spec.protocols) {
        for (Strategy s : spec.strategies) {
            for (int n : spec.node_counts) {
                for (double r : spec.ranges) {
                    for (std::uint64_t seed : spec.seeds) {
                        ScenarioConfig cfg = spec.base;
                        cfg.protocol = p;
                        cfg.strategy = s;
                        cfg.trust.strategy = s;
                        cfg.nodes = n;
                        cfg.range_m = r;
                        cfg.seed = seed;
                        grid.push_back(cfg);
                    }
                }
            }
        }
    }
    return grid;
}

// Runs are independent; rows come back in grid order regardless of which
// worker finished first.
inline std::vector<ResultRow> run_grid(const std::vector<ScenarioConfig>& grid, unsigned jobs) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, grid.empty() ? 1 : static_cast<unsigned>(grid.size()));
    std::vector<ResultRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            rows[i] = run_scenario(grid[i]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

namespace detail {

struct Stats {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

inline Stats stats(const std::vector<double>& xs) {
    Stats s;
    s.n = xs.size();
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace detail

// Streams one row per grid point per seed, then appends per-grid-point
// mean / sample-sd summary lines as '#summary' comment rows.
inline void write_sweep_csv(const SweepSpec& spec, const std::vector<ResultRow>& rows,
                            std::ostream& out) {
    out << ResultRow::csv_header() << "\n";
    for (const auto& r : rows) out << r.to_csv() << "\n";

    out << "#summary,protocol,strategy,nodes,range_m,pdr_mean,pdr_sd,overhead_mean,"
           "overhead_sd,avg_delay_mean,throughput_mean\n";
    const std::size_t per_point = spec.seeds.size();
    for (std::size_t base = 0; base + per_point <= rows.size(); base += per_point) {
        std::vector<double> pdrs, overheads, delays, throughputs;
        for (std::size_t i = base; i < base + per_point; ++i) {
            if (rows[i].report.pdr) pdrs.push_back(*rows[i].report.pdr);
            if (rows[i].report.overhead) overheads.push_back(*rows[i].report.overhead);
            if (rows[i].report.avg_delay) delays.push_back(*rows[i].report.avg_delay);
            throughputs.push_back(rows[i].report.throughput);
        }
        const auto p = detail::stats(pdrs);
        const auto o = detail::stats(overheads);
        const auto d = detail::stats(delays);
        const auto t = detail::stats(throughputs);
        const ScenarioConfig& cfg = rows[base].cfg;
        out << "#summary," << to_string(cfg.protocol) << ',' << to_string(cfg.strategy) << ','
            << cfg.nodes << ',' << ResultRow::fmt(cfg.range_m) << ','
            << (p.n ? ResultRow::fmt(p.mean) : "") << ',' << (p.n > 1 ? ResultRow::fmt(p.sd) : "")
            << ',' << (o.n ? ResultRow::fmt(o.mean) : "") << ','
            << (o.n > 1 ? ResultRow::fmt(o.sd) : "") << ','
            << (d.n ? ResultRow::fmt(d.mean) : "") << ',' << ResultRow::fmt(t.mean) << "\n";
    }
}

inline std::vector<ResultRow> sweep_to_file(const SweepSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output path: " + path);
    const auto rows = run_grid(expand_grid(spec), spec.jobs);
    write_sweep_csv(spec, rows, out);
    return rows;
}

// --- figures: tabular datasets for the four comparisons ---

struct ParsedCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
};

inline ParsedCsv parse_csv(std::istream& in) {
    ParsedCsv csv;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (line.back() == ',') fields.push_back("");
        if (header) {
            csv.columns = fields;
            header = false;
        } else {
            csv.rows.push_back(fields);
        }
    }
    return csv;
}

// Emits the four plot-data tables: PDR and overhead vs node count, for
// the with-malicious (strategy none, adversary fraction > 0) and the
// malicious-eliminated (strategy eliminate) configurations, one series
// per protocol. Returns the paths written.
inline std::vector<std::string> write_figures(std::istream& csv_in, const std::string& out_dir) {
    ParsedCsv csv = parse_csv(csv_in);
    const char* required[] = {"protocol", "strategy", "nodes", "adversary_fraction",
                              "pdr", "overhead"};
    for (const char* c : required) {
        if (csv.col(c) < 0) {
            throw std::runtime_error(std::string("figures: csv missing required column: ") + c);
        }
    }
    const int c_proto = csv.col("protocol");
    const int c_strat = csv.col("strategy");
    const int c_nodes = csv.col("nodes");
    const int c_frac = csv.col("adversary_fraction");
    const int c_pdr = csv.col("pdr");
    const int c_over = csv.col("overhead");

    struct Acc {
        double sum = 0.0;
        std::size_t n = 0;
    };
    // key: (strategy-kind 0=none,1=eliminate, metric 0=pdr,1=overhead, protocol, nodes)
    std::map<std::tuple<int, int, std::string, int>, Acc> acc;
    for (const auto& row : csv.rows) {
        const std::string& strat = row[c_strat];
        int kind;
        if (strat == "none") kind = 0;
        else if (strat == "eliminate") kind = 1;
        else continue;
        if (kind == 0 && std::stod(row[c_frac]) <= 0.0) continue;
        const int nodes = std::stoi(row[c_nodes]);
        if (!row[c_pdr].empty()) {
            auto& a = acc[{kind, 0, row[c_proto], nodes}];
            a.sum += std::stod(row[c_pdr]);
            ++a.n;
        }
        if (!row[c_over].empty()) {
            auto& a = acc[{kind, 1, row[c_proto], nodes}];
            a.sum += std::stod(row[c_over]);
            ++a.n;
        }
    }

    const struct {
        const char* file;
        int kind;
        int metric;
        const char* title;
    } specs[] = {
        {"fig1_pdr_with_malicious.dat", 0, 0, "packet delivery ratio, misbehaving nodes kept"},
        {"fig2_pdr_malicious_eliminated.dat", 1, 0,
         "packet delivery ratio, misbehaving nodes eliminated"},
        {"fig3_overhead_with_malicious.dat", 0, 1, "routing overhead, misbehaving nodes kept"},
        {"fig4_overhead_malicious_eliminated.dat", 1, 1,
         "routing overhead, misbehaving nodes eliminated"},
    };

    std::vector<std::string> written;
    for (const auto& s : specs) {
        std::set<int> node_counts;
        std::set<std::string> protocols;
        for (const auto& [key, a] : acc) {
            if (std::get<0>(key) == s.kind && std::get<1>(key) == s.metric) {
                protocols.insert(std::get<2>(key));
                node_counts.insert(std::get<3>(key));
            }
        }
        for (const char* proto : {"aodv", "dsr"}) {
            if (!protocols.count(proto)) {
                std::cerr << "figures: warning: no " << proto << " rows for " << s.file
                          << ", series omitted\n";
            }
        }
        const std::string path = out_dir + "/" + s.file;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open output path: " + path);
        out << "# " << s.title << "\n";
        out << "# means over all seeds and ranges at the run's adversary fraction\n";
        out << "# nodes";
        for (const auto& p : protocols) out << ' ' << p;
        out << "\n";
        for (int n : node_counts) {
            out << n;
            for (const auto& p : protocols) {
                auto it = acc.find({s.kind, s.metric, p, n});
                if (it != acc.end() && it->second.n > 0) {
                    out << ' ' << ResultRow::fmt(it->second.sum / it->second.n);
                } else {
                    out << " -";
                }
            }
            out << "\n";
        }
        written.push_back(path);
    }
    return written;
}

}  // namespace manetsim
