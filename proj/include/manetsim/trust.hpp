#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "manetsim/mobility.hpp"
#include "manetsim/sim_time.hpp"

namespace manetsim {

enum class Strategy { None, Eliminate, SecondChance };

enum class Outcome { Forwarded, Dropped };

enum class Verdict { UseAsNextHop, GiveSecondChance, Eliminate };

enum class NodeStatus { Active, Eliminated, Reintegrated };

// Inferred misbehavior class, as seen by the trust layer. Faulty causes
// (node/link/energy failure) are pardonable under the second-chance
// strategy; deliberate droppers and black holes are not.
enum class CauseClass { Unknown, Faulty, Selfish };

struct TrustRecord {
    NodeId subject = 0;
    double trust = 0.5;
    std::uint64_t forwards_seen = 0;
    std::uint64_t drops_seen = 0;
    CauseClass attributed = CauseClass::Unknown;
    NodeStatus status = NodeStatus::Active;
    int chances_left = 1;
    int offenses = 0;        // decide() calls that found trust below tolerance
    int reintegrations = 0;
    SimTime last_update;
};

struct StrategyConfig {
    Strategy strategy = Strategy::None;
    double tolerance = 0.4;
    double reward = 0.05;            // trust gained per observed forward
    double penalty = 0.15;           // trust lost per observed drop
    double reintegration_trust = 0.4;
    double initial_trust = 0.5;
    int max_second_chances = 1;
    bool per_watcher = false;        // default: one shared record per subject
    bool blind_attribution = false;  // treat every cause as Unknown
};

struct DecisionLogRow {
    SimTime time;
    NodeId watcher;
    NodeId subject;
    double trust;
    Verdict verdict;
};

class TrustLedger {
public:
    explicit TrustLedger(StrategyConfig cfg = {}) : cfg_(cfg) {}

    const StrategyConfig& config() const { return cfg_; }

    TrustRecord& observe(NodeId watcher, NodeId subject, Outcome outcome, SimTime now) {
        TrustRecord& r = record(watcher, subject);
        if (outcome == Outcome::Forwarded) {
            r.trust = std::min(1.0, r.trust + cfg_.reward);
            ++r.forwards_seen;
        } else {
            r.trust = std::max(0.0, r.trust - cfg_.penalty);
            ++r.drops_seen;
        }
        r.last_update = now;
        return r;
    }

    // Applies the verdict's side effects (status change, trust reset).
    Verdict decide(TrustRecord& r, SimTime now) {
        Verdict v = Verdict::UseAsNextHop;
        switch (cfg_.strategy) {
            case Strategy::None:
                break;
            case Strategy::Eliminate:
                if (r.trust < cfg_.tolerance) v = Verdict::Eliminate;
                break;
            case Strategy::SecondChance:
                if (r.trust < cfg_.tolerance) {
                    ++r.offenses;
                    const bool pardonable = r.attributed != CauseClass::Selfish;
                    if (pardonable && r.chances_left > 0) {
                        v = Verdict::GiveSecondChance;
                    } else if (!pardonable && r.offenses < 2) {
                        v = Verdict::UseAsNextHop;  // one grace period before elimination
                    } else {
                        v = Verdict::Eliminate;
                    }
                }
                break;
        }
        if (v == Verdict::Eliminate) {
            r.status = NodeStatus::Eliminated;
        } else if (v == Verdict::GiveSecondChance) {
            r.status = NodeStatus::Reintegrated;
            r.trust = cfg_.reintegration_trust;
            --r.chances_left;
            ++r.reintegrations;
        }
        r.last_update = now;
        return v;
    }

    void set_attribution(NodeId watcher, NodeId subject, CauseClass c) {
        record(watcher, subject).attributed = cfg_.blind_attribution ? CauseClass::Unknown : c;
    }

    bool admissible(NodeId watcher, NodeId subject) const {
        auto it = records_.find(key(watcher, subject));
        return it == records_.end() || it->second.status != NodeStatus::Eliminated;
    }

    // Eliminated subjects removed; survivors ranked by trust descending,
    // ties by NodeId ascending.
    std::vector<NodeId> route_filter(NodeId watcher, std::span<const NodeId> candidates) const {
        std::vector<NodeId> out;
        for (NodeId c : candidates) {
            if (admissible(watcher, c)) out.push_back(c);
        }
        std::stable_sort(out.begin(), out.end(), [&](NodeId a, NodeId b) {
            const double ta = trust_of(watcher, a);
            const double tb = trust_of(watcher, b);
            if (ta != tb) return ta > tb;
            return a < b;
        });
        return out;
    }

    double trust_of(NodeId watcher, NodeId subject) const {
        auto it = records_.find(key(watcher, subject));
        return it == records_.end() ? cfg_.initial_trust : it->second.trust;
    }

    TrustRecord& record(NodeId watcher, NodeId subject) {
        auto [it, inserted] = records_.try_emplace(key(watcher, subject));
        if (inserted) {
            it->second.subject = subject;
            it->second.trust = cfg_.initial_trust;
            it->second.chances_left = cfg_.max_second_chances;
        }
        return it->second;
    }

    const TrustRecord* find(NodeId watcher, NodeId subject) const {
        auto it = records_.find(key(watcher, subject));
        return it == records_.end() ? nullptr : &it->second;
    }

    const std::unordered_map<std::uint64_t, TrustRecord>& records() const { return records_; }

private:
    std::uint64_t key(NodeId watcher, NodeId subject) const {
        return cfg_.per_watcher ? (static_cast<std::uint64_t>(watcher) << 32) | subject
                                : subject;
    }

    StrategyConfig cfg_;
    std::unordered_map<std::uint64_t, TrustRecord> records_;
};

}  // namespace manetsim
