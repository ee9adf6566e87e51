// Command-line front end: single runs, experiment sweeps, and the four
// plot-data tables derived from a sweep CSV.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manetsim/harness.hpp"

namespace {

using namespace manetsim;

int log_level() {
    const char* v = std::getenv("MANETSIM_LOG");
    return v ? std::atoi(v) : 0;
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> protocols;
    std::vector<std::string> strategies;
    std::vector<int> nodes;
    std::vector<double> ranges;
    double adversary_fraction = -1.0;  // <0 = keep config default
    double tolerance = -1.0;
    double duration = -1.0;
    std::vector<std::uint64_t> seed_list;
    int seeds_n = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool lists) {
    cmd->add_option("--config", o.config_path, "config file (key = value, [section] headers)");
    auto* p = cmd->add_option("--protocol", o.protocols, "aodv | dsr");
    auto* s = cmd->add_option("--strategy", o.strategies, "none | eliminate | second-chance");
    auto* n = cmd->add_option("--nodes", o.nodes, "node count");
    auto* r = cmd->add_option("--range", o.ranges, "communication range in meters");
    if (lists) {
        p->delimiter(',');
        s->delimiter(',');
        n->delimiter(',');
        r->delimiter(',');
    }
    cmd->add_option("--adversary-fraction", o.adversary_fraction,
                    "fraction of misbehaving nodes");
    cmd->add_option("--tolerance", o.tolerance, "trust tolerance threshold");
    cmd->add_option("--duration", o.duration, "simulated seconds");
    cmd->add_option("--seed", o.seed_list, "run seed(s)")->delimiter(',');
    cmd->add_option("--seeds", o.seeds_n, "expands to seeds 1..N");
}

ScenarioConfig base_config(const CommonOpts& o) {
    ScenarioConfig cfg;
    if (!o.config_path.empty()) load_config_file(cfg, o.config_path);
    if (o.adversary_fraction >= 0.0) cfg.adversary.fraction = o.adversary_fraction;
    if (o.tolerance >= 0.0) cfg.trust.tolerance = o.tolerance;
    if (o.duration > 0.0) cfg.duration_s = o.duration;
    return cfg;
}

std::vector<std::uint64_t> seeds_of(const CommonOpts& o, std::uint64_t fallback) {
    if (o.seeds_n > 0) {
        std::vector<std::uint64_t> s(static_cast<std::size_t>(o.seeds_n));
        std::iota(s.begin(), s.end(), 1);
        return s;
    }
    if (!o.seed_list.empty()) return o.seed_list;
    return {fallback};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic MANET simulator: AODV/DSR under misbehaving nodes"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    std::string run_out;
    auto* run_cmd = app.add_subcommand("run", "execute a single scenario, print its CSV row");
    add_common(run_cmd, run_opts, false);
    run_cmd->add_option("--out", run_out, "write the row to this file instead of stdout");

    CommonOpts sweep_opts;
    std::string sweep_out;
    unsigned jobs = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario grid, write a CSV");
    add_common(sweep_cmd, sweep_opts, true);
    sweep_cmd->add_option("--out", sweep_out, "output CSV path")->required();
    sweep_cmd->add_option("--jobs", jobs, "parallel runs (0 = all cores)");

    std::string fig_csv, fig_out = ".";
    auto* fig_cmd = app.add_subcommand("figures", "emit the four plot-data tables from a sweep CSV");
    fig_cmd->add_option("csv", fig_csv, "sweep CSV path")->required();
    fig_cmd->add_option("--out", fig_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            ScenarioConfig cfg = base_config(run_opts);
            if (!run_opts.protocols.empty()) cfg.protocol = parse_protocol(run_opts.protocols.front());
            if (!run_opts.strategies.empty()) {
                cfg.strategy = parse_strategy(run_opts.strategies.front());
            }
            if (!run_opts.nodes.empty()) cfg.nodes = run_opts.nodes.front();
            if (!run_opts.ranges.empty()) cfg.range_m = run_opts.ranges.front();
            cfg.seed = seeds_of(run_opts, cfg.seed).front();
            cfg.validate();
            if (log_level() > 0) std::cerr << "running single scenario\n";
            const ResultRow row = run_scenario(cfg);
            if (run_out.empty()) {
                std::cout << ResultRow::csv_header() << "\n" << row.to_csv() << "\n";
            } else {
                std::ofstream out(run_out);
                if (!out) throw std::runtime_error("cannot open output path: " + run_out);
                out << ResultRow::csv_header() << "\n" << row.to_csv() << "\n";
            }
        } else if (*sweep_cmd) {
            SweepSpec spec;
            spec.base = base_config(sweep_opts);
            spec.jobs = jobs;
            if (!sweep_opts.protocols.empty()) {
                spec.protocols.clear();
                for (const auto& p : sweep_opts.protocols) spec.protocols.push_back(parse_protocol(p));
            }
            if (!sweep_opts.strategies.empty()) {
                spec.strategies.clear();
                for (const auto& s : sweep_opts.strategies) {
                    spec.strategies.push_back(parse_strategy(s));
                }
            }
            if (!sweep_opts.nodes.empty()) spec.node_counts = sweep_opts.nodes;
            if (!sweep_opts.ranges.empty()) spec.ranges = sweep_opts.ranges;
            spec.seeds = seeds_of(sweep_opts, spec.base.seed);
            for (const auto& cfg : expand_grid(spec)) cfg.validate();
            {   // fail on an unwritable path before any simulation starts
                std::ofstream probe(sweep_out, std::ios::app);
                if (!probe) throw std::runtime_error("cannot open output path: " + sweep_out);
            }
            if (log_level() > 0) {
                std::cerr << "sweep: " << expand_grid(spec).size() << " runs\n";
            }
            sweep_to_file(spec, sweep_out);
        } else if (*fig_cmd) {
            std::ifstream in(fig_csv);
            if (!in) throw std::runtime_error("cannot open csv: " + fig_csv);
            std::filesystem::create_directories(fig_out);
            for (const auto& path : write_figures(in, fig_out)) {
                if (log_level() > 0) std::cerr << "wrote " << path << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
