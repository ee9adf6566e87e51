#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "manetsim/rng.hpp"
#include "manetsim/sim_time.hpp"

namespace manetsim {

using NodeId = std::uint32_t;

struct Terrain {
    double width = 500.0;
    double height = 550.0;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Position a, Position b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Random waypoint walker. A speed of exactly 0 means the node stays put
// for the whole run.
struct WaypointState {
    Position current;
    Position target;
    double speed = 0.0;
    SimTime pause_until;
};

struct MobilityConfig {
    double v_max = 20.0;
    SimTime pause;  // dwell time at each waypoint, default 0
};

namespace detail {

inline Position draw_position(const Terrain& t, RngStream& rng) {
    return Position{rng.uniform(0.0, t.width), rng.uniform(0.0, t.height)};
}

inline void draw_leg(WaypointState& s, const Terrain& t, const MobilityConfig& cfg,
                     RngStream& rng) {
    s.target = draw_position(t, rng);
    s.speed = rng.uniform(0.0, cfg.v_max);
    if (s.speed == 0.0) s.target = s.current;
}

}  // namespace detail

inline std::vector<WaypointState> init_positions(int n, const Terrain& terrain,
                                                 const MobilityConfig& cfg, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("init_positions: need at least 2 nodes");
    std::vector<WaypointState> states(static_cast<std::size_t>(n));
    for (auto& s : states) {
        s.current = detail::draw_position(terrain, rng);
        detail::draw_leg(s, terrain, cfg, rng);
    }
    return states;
}

// Advance one node by dt, consuming pauses and waypoint arrivals along
// the way. now is the simulation time at the start of the step.
inline void advance(WaypointState& s, SimTime now, SimTime dt, const Terrain& terrain,
                    const MobilityConfig& cfg, RngStream& rng) {
    if (dt.count_micros() <= 0) throw std::invalid_argument("advance: dt must be positive");
    if (s.speed == 0.0 && s.pause_until <= now) return;  // stationary node

    double remaining = dt.as_seconds();
    SimTime t = now;
    int legs = 0;
    while (remaining > 1e-12 && legs++ < 100000) {
        if (t < s.pause_until) {
            const double wait = std::min(remaining, (s.pause_until - t).as_seconds());
            remaining -= wait;
            t += SimTime::seconds(wait);
            if (remaining <= 1e-12) break;
        }
        if (s.speed == 0.0) break;
        const double dist = distance(s.current, s.target);
        const double step = s.speed * remaining;
        if (step < dist) {
            const double frac = step / dist;
            s.current.x += (s.target.x - s.current.x) * frac;
            s.current.y += (s.target.y - s.current.y) * frac;
            remaining = 0.0;
        } else {
            // arrival: land exactly on the waypoint, then pause and redraw
            s.current = s.target;
            const double travel = dist / s.speed;
            remaining -= travel;
            t += SimTime::seconds(travel);
            s.pause_until = t + cfg.pause;
            detail::draw_leg(s, terrain, cfg, rng);
        }
    }
    s.current.x = std::clamp(s.current.x, 0.0, terrain.width);
    s.current.y = std::clamp(s.current.y, 0.0, terrain.height);
}

// Unit-disk neighborhood; distance exactly equal to the radius counts
// as connected.
inline std::vector<NodeId> neighbors(NodeId node, std::span<const Position> positions,
                                     double radius) {
    std::vector<NodeId> out;
    for (NodeId j = 0; j < positions.size(); ++j) {
        if (j == node) continue;
        if (distance(positions[node], positions[j]) <= radius) out.push_back(j);
    }
    return out;
}

}  // namespace manetsim
