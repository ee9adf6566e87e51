#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "manetsim/adversary.hpp"
#include "manetsim/aodv.hpp"
#include "manetsim/dsr.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/trust.hpp"

namespace manetsim {

enum class Protocol { Aodv, Dsr };

inline const char* to_string(Protocol p) { return p == Protocol::Aodv ? "aodv" : "dsr"; }
inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::None: return "none";
        case Strategy::Eliminate: return "eliminate";
        case Strategy::SecondChance: return "second-chance";
    }
    return "?";
}

inline Protocol parse_protocol(const std::string& s) {
    if (s == "aodv") return Protocol::Aodv;
    if (s == "dsr") return Protocol::Dsr;
    throw std::invalid_argument("protocol: expected aodv or dsr, got '" + s + "'");
}

inline Strategy parse_strategy(const std::string& s) {
    if (s == "none") return Strategy::None;
    if (s == "eliminate") return Strategy::Eliminate;
    if (s == "second-chance" || s == "second_chance") return Strategy::SecondChance;
    throw std::invalid_argument("strategy: expected none, eliminate or second-chance, got '" +
                                s + "'");
}

// Full experiment description. Every field has a default; terrain,
// speeds, traffic and payload defaults follow the reference setup.
struct ScenarioConfig {
    Protocol protocol = Protocol::Aodv;
    Strategy strategy = Strategy::None;
    int nodes = 40;
    double range_m = 135.0;
    Terrain terrain;
    double speed_max = 20.0;
    double pause_s = 0.0;
    double mobility_tick_s = 0.5;
    double rate_pps = 4.0;
    std::uint32_t payload_bytes = 512;
    double duration_s = 300.0;
    int flows = 0;  // 0 = max(1, nodes / 5)
    AdversarySpec adversary;
    StrategyConfig trust;
    double watchdog_timeout_s = 0.5;
    std::uint64_t seed = 1;
    bool record_event_log = false;
    bool record_decision_log = false;
    AodvParams aodv;
    DsrParams dsr;

    int effective_flows() const { return flows > 0 ? flows : std::max(1, nodes / 5); }
    SimTime duration() const { return SimTime::seconds(duration_s); }

    void validate() const {
        auto fail = [](const std::string& field, const std::string& msg) {
            throw std::invalid_argument(field + ": " + msg);
        };
        if (nodes < 2) fail("nodes", "need at least 2 nodes");
        if (range_m <= 0.0) fail("range_m", "must be positive");
        if (terrain.width <= 0.0 || terrain.height <= 0.0) fail("terrain", "must be positive");
        if (speed_max < 0.0) fail("speed_max", "must be non-negative");
        if (pause_s < 0.0) fail("pause_s", "must be non-negative");
        if (mobility_tick_s <= 0.0) fail("mobility_tick_s", "must be positive");
        if (rate_pps <= 0.0) fail("rate_pps", "must be positive");
        if (payload_bytes == 0) fail("payload_bytes", "must be positive");
        if (duration_s <= 0.0) fail("duration_s", "must be positive");
        if (flows < 0) fail("flows", "must be non-negative");
        if (adversary.fraction < 0.0 || adversary.fraction >= 1.0) {
            fail("adversary.fraction", "must be in [0, 1)");
        }
        if (adversary.fraction > 0.0 && adversary.weights.total() <= 0.0) {
            fail("adversary.weights", "must sum to a positive value");
        }
        if (adversary.drop_probability < 0.0 || adversary.drop_probability > 1.0) {
            fail("adversary.drop_probability", "must be in [0, 1]");
        }
        if (adversary.energy_initial < 0.0) fail("adversary.energy_initial", "must be >= 0");
        if (trust.tolerance <= 0.0 || trust.tolerance >= 1.0) {
            fail("trust.tolerance", "must be in (0, 1)");
        }
        if (trust.reward <= 0.0) fail("trust.reward", "must be positive");
        if (trust.penalty <= 0.0) fail("trust.penalty", "must be positive");
        if (trust.initial_trust < 0.0 || trust.initial_trust > 1.0) {
            fail("trust.initial_trust", "must be in [0, 1]");
        }
        if (trust.reintegration_trust < 0.0 || trust.reintegration_trust > 1.0) {
            fail("trust.reintegration_trust", "must be in [0, 1]");
        }
        if (trust.max_second_chances < 0) fail("trust.max_second_chances", "must be >= 0");
        if (watchdog_timeout_s <= 0.0) fail("watchdog_timeout_s", "must be positive");
    }
};

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": not a number: '" + v + "'");
    }
}

inline std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::int64_t i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": not an integer: '" + v + "'");
    }
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void apply_config_key(ScenarioConfig& cfg, const std::string& key,
                             const std::string& value) {
    using detail::to_bool;
    using detail::to_double;
    using detail::to_int;
    if (key == "sim.protocol" || key == "protocol") cfg.protocol = parse_protocol(value);
    else if (key == "sim.strategy" || key == "strategy") {
        cfg.strategy = parse_strategy(value);
        cfg.trust.strategy = cfg.strategy;
    } else if (key == "sim.nodes" || key == "nodes") cfg.nodes = static_cast<int>(to_int(key, value));
    else if (key == "sim.duration_s" || key == "duration_s") cfg.duration_s = to_double(key, value);
    else if (key == "sim.seed" || key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "mobility.range_m" || key == "range_m") cfg.range_m = to_double(key, value);
    else if (key == "mobility.terrain_width") cfg.terrain.width = to_double(key, value);
    else if (key == "mobility.terrain_height") cfg.terrain.height = to_double(key, value);
    else if (key == "mobility.speed_max") cfg.speed_max = to_double(key, value);
    else if (key == "mobility.pause_s") cfg.pause_s = to_double(key, value);
    else if (key == "mobility.tick_s") cfg.mobility_tick_s = to_double(key, value);
    else if (key == "traffic.rate_pps") cfg.rate_pps = to_double(key, value);
    else if (key == "traffic.payload_bytes") cfg.payload_bytes = static_cast<std::uint32_t>(to_int(key, value));
    else if (key == "traffic.flows") cfg.flows = static_cast<int>(to_int(key, value));
    else if (key == "adversary.fraction") cfg.adversary.fraction = to_double(key, value);
    else if (key == "adversary.weight_deliberate_drop") cfg.adversary.weights.deliberate_drop = to_double(key, value);
    else if (key == "adversary.weight_black_hole") cfg.adversary.weights.black_hole = to_double(key, value);
    else if (key == "adversary.weight_node_failure") cfg.adversary.weights.node_failure = to_double(key, value);
    else if (key == "adversary.weight_link_failure") cfg.adversary.weights.link_failure = to_double(key, value);
    else if (key == "adversary.weight_energy_depletion") cfg.adversary.weights.energy_depletion = to_double(key, value);
    else if (key == "adversary.drop_probability") cfg.adversary.drop_probability = to_double(key, value);
    else if (key == "adversary.energy_initial") cfg.adversary.energy_initial = to_double(key, value);
    else if (key == "adversary.energy_tx_cost") cfg.adversary.energy_tx_cost = to_double(key, value);
    else if (key == "adversary.energy_rx_cost") cfg.adversary.energy_rx_cost = to_double(key, value);
    else if (key == "trust.tolerance") cfg.trust.tolerance = to_double(key, value);
    else if (key == "trust.reward") cfg.trust.reward = to_double(key, value);
    else if (key == "trust.penalty") cfg.trust.penalty = to_double(key, value);
    else if (key == "trust.reintegration_trust") cfg.trust.reintegration_trust = to_double(key, value);
    else if (key == "trust.initial_trust") cfg.trust.initial_trust = to_double(key, value);
    else if (key == "trust.max_second_chances") cfg.trust.max_second_chances = static_cast<int>(to_int(key, value));
    else if (key == "trust.per_watcher") cfg.trust.per_watcher = to_bool(key, value);
    else if (key == "trust.blind_attribution") cfg.trust.blind_attribution = to_bool(key, value);
    else if (key == "trust.watchdog_timeout_s") cfg.watchdog_timeout_s = to_double(key, value);
    else if (key == "protocol.ttl") { cfg.aodv.ttl = static_cast<int>(to_int(key, value)); cfg.dsr.ttl = cfg.aodv.ttl; }
    else if (key == "protocol.route_lifetime_s") cfg.aodv.route_lifetime = SimTime::seconds(to_double(key, value));
    else if (key == "protocol.dsr_salvage") cfg.dsr.salvage = to_bool(key, value);
    else if (key == "protocol.dsr_cache_replies") cfg.dsr.cache_replies = to_bool(key, value);
    else throw std::invalid_argument("unknown config key: '" + key + "'");
}

// Flat key = value format with [section] headers; '#' starts a comment.
inline void load_config_file(ScenarioConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        apply_config_key(cfg, key, value);
    }
}

}  // namespace manetsim
