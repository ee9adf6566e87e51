#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"
#include "manetsim/sim_time.hpp"
#include "manetsim/trust.hpp"

namespace manetsim {

enum class CauseKind {
    DeliberateDrop,
    BlackHole,
    NodeFailure,
    LinkFailure,
    EnergyDepletion,
};

inline CauseClass classify(CauseKind k) {
    switch (k) {
        case CauseKind::DeliberateDrop:
        case CauseKind::BlackHole:
            return CauseClass::Selfish;
        default:
            return CauseClass::Faulty;
    }
}

struct MisbehaviorCause {
    CauseKind kind = CauseKind::DeliberateDrop;
    double drop_probability = 0.8;   // DeliberateDrop
    SimTime failure_onset;           // NodeFailure
    NodeId broken_peer = 0;          // LinkFailure: the dead link's far end
    double energy_initial = 1000.0;  // EnergyDepletion
    double energy_tx_cost = 1.0;
    double energy_rx_cost = 1.0;
};

struct CauseWeights {
    double deliberate_drop = 0.05;
    double black_hole = 0.1;
    double node_failure = 0.05;
    double link_failure = 0.7;
    double energy_depletion = 0.1;

    double total() const {
        return deliberate_drop + black_hole + node_failure + link_failure + energy_depletion;
    }
};

struct AdversaryProfile {
    std::map<NodeId, MisbehaviorCause> assignments;
    double fraction = 0.0;
};

struct AdversarySpec {
    double fraction = 0.2;
    CauseWeights weights;
    double drop_probability = 0.8;
    double energy_initial = 1000.0;
    double energy_tx_cost = 1.0;
    double energy_rx_cost = 1.0;
    SimTime max_onset;  // NodeFailure onset drawn uniform in [0, max_onset]
};

struct EnergyState {
    double remaining = 0.0;
    double tx_cost = 1.0;
    double rx_cost = 1.0;

    bool can_transmit() const { return remaining >= tx_cost; }
    void debit_tx() { remaining = std::max(0.0, remaining - tx_cost); }
    void debit_rx() { remaining = std::max(0.0, remaining - rx_cost); }
};

enum class ForwardVerdict { Forward, Drop };

struct AdversaryNodeState {
    MisbehaviorCause cause;
    EnergyState energy;
};

// Verdict for a data packet that arrived at a misbehaving node from
// `from` and needs forwarding. Control traffic is not routed through
// here: misbehaving nodes handle control normally (black holes forge
// replies instead, node failures go silent entirely).
inline ForwardVerdict intercept_forward(AdversaryNodeState& st, SimTime now, NodeId from,
                                        RngStream& rng) {
    switch (st.cause.kind) {
        case CauseKind::BlackHole:
            return ForwardVerdict::Drop;
        case CauseKind::DeliberateDrop:
            return rng.uniform(0.0, 1.0) < st.cause.drop_probability ? ForwardVerdict::Drop
                                                                     : ForwardVerdict::Forward;
        case CauseKind::NodeFailure:
            return now >= st.cause.failure_onset ? ForwardVerdict::Drop : ForwardVerdict::Forward;
        case CauseKind::LinkFailure:
            return from == st.cause.broken_peer ? ForwardVerdict::Drop : ForwardVerdict::Forward;
        case CauseKind::EnergyDepletion:
            return st.energy.can_transmit() ? ForwardVerdict::Forward : ForwardVerdict::Drop;
    }
    return ForwardVerdict::Forward;
}

// Forged AODV reply: claims to be one hop from the destination with an
// inflated destination sequence number.
inline Rrep forge_aodv_reply(const Rreq& rreq, std::uint32_t seq_inflation = 10) {
    return Rrep{rreq.dest, rreq.dest_seq_known + seq_inflation, 1, rreq.origin};
}

// Forged DSR reply: pretends the destination is directly behind the
// black hole.
inline DsrReply forge_dsr_reply(const DsrRequest& req, NodeId self) {
    DsrReply reply;
    reply.route = req.accumulated;
    reply.route.push_back(self);
    if (self != req.dest) reply.route.push_back(req.dest);
    return reply;
}

// Draws floor(fraction * n) nodes without replacement and distributes
// causes by the configured weights. When initial positions are supplied,
// a LinkFailure node's broken peer is drawn from its actual neighbors so
// the dead link exists in the topology.
inline AdversaryProfile assign(const AdversarySpec& spec, const std::vector<NodeId>& nodes,
                               RngStream& rng,
                               const std::vector<Position>* positions = nullptr,
                               double range = 0.0) {
    if (spec.fraction < 0.0 || spec.fraction >= 1.0) {
        throw std::invalid_argument("adversary fraction must be in [0, 1)");
    }
    AdversaryProfile profile;
    profile.fraction = spec.fraction;
    const auto count =
        static_cast<std::size_t>(spec.fraction * static_cast<double>(nodes.size()));
    if (count == 0) return profile;
    if (spec.weights.total() <= 0.0) {
        throw std::invalid_argument("adversary cause weights must sum to a positive value");
    }

    std::vector<NodeId> pool = nodes;
    rng.shuffle(pool);
    pool.resize(count);

    const double w[5] = {spec.weights.deliberate_drop, spec.weights.black_hole,
                         spec.weights.node_failure, spec.weights.link_failure,
                         spec.weights.energy_depletion};
    const double total = spec.weights.total();

    for (NodeId id : pool) {
        const double pick = rng.uniform(0.0, total);
        double acc = 0.0;
        CauseKind kind = CauseKind::EnergyDepletion;
        for (int i = 0; i < 5; ++i) {
            acc += w[i];
            if (pick < acc) {
                kind = static_cast<CauseKind>(i);
                break;
            }
        }
        MisbehaviorCause cause;
        cause.kind = kind;
        cause.drop_probability = spec.drop_probability;
        cause.energy_initial = spec.energy_initial;
        cause.energy_tx_cost = spec.energy_tx_cost;
        cause.energy_rx_cost = spec.energy_rx_cost;
        if (kind == CauseKind::NodeFailure) {
            cause.failure_onset = SimTime::micros(static_cast<std::int64_t>(
                rng.uniform_int(static_cast<std::uint64_t>(spec.max_onset.count_micros()) + 1)));
        }
        if (kind == CauseKind::LinkFailure) {
            std::vector<NodeId> candidates;
            if (positions && range > 0.0) {
                candidates = neighbors(id, *positions, range);
            }
            if (!candidates.empty()) {
                cause.broken_peer = candidates[rng.uniform_int(candidates.size())];
            } else {
                NodeId peer;
                do {
                    peer = nodes[rng.uniform_int(nodes.size())];
                } while (peer == id);
                cause.broken_peer = peer;
            }
        }
        profile.assignments.emplace(id, cause);
    }
    return profile;
}

}  // namespace manetsim
