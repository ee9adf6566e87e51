#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "manetsim/adversary.hpp"
#include "manetsim/aodv.hpp"
#include "manetsim/dsr.hpp"
#include "manetsim/event_queue.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/net.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/trust.hpp"

namespace manetsim {

// One complete simulation run. Owns all state; single-threaded. The same
// config and seed always reproduce the same run.
class Simulation final : public Network {
public:
    explicit Simulation(const ScenarioConfig& cfg)
        : cfg_(cfg),
          mobility_rng_(cfg.seed, "mobility"),
          traffic_rng_(cfg.seed, "traffic"),
          adversary_rng_(cfg.seed, "adversary"),
          jitter_rng_(cfg.seed, "jitter"),
          trust_(trust_config(cfg)) {
        cfg_.validate();
        MobilityConfig mcfg{cfg_.speed_max, SimTime::seconds(cfg_.pause_s)};
        states_ = init_positions(cfg_.nodes, cfg_.terrain, mcfg, mobility_rng_);

        AdversarySpec aspec = cfg_.adversary;
        if (aspec.max_onset.count_micros() == 0) aspec.max_onset = cfg_.duration();
        std::vector<NodeId> ids(static_cast<std::size_t>(cfg_.nodes));
        for (NodeId i = 0; i < ids.size(); ++i) ids[i] = i;
        std::vector<Position> initial(states_.size());
        for (std::size_t i = 0; i < states_.size(); ++i) initial[i] = states_[i].current;
        set_adversary_profile(assign(aspec, ids, adversary_rng_, &initial, cfg_.range_m));

        flows_ = draw_flows();
        build_agents();
    }

    // --- test hooks, call before run() ---

    void freeze_positions(const std::vector<Position>& positions) {
        if (positions.size() != states_.size()) {
            throw std::invalid_argument("freeze_positions: wrong node count");
        }
        for (std::size_t i = 0; i < positions.size(); ++i) {
            states_[i].current = positions[i];
            states_[i].target = positions[i];
            states_[i].speed = 0.0;
            states_[i].pause_until = SimTime{};
        }
    }

    void set_flows(std::vector<CbrFlow> flows) { flows_ = std::move(flows); }

    void set_adversary_profile(AdversaryProfile profile) {
        profile_ = std::move(profile);
        adversary_states_.clear();
        for (const auto& [id, cause] : profile_.assignments) {
            AdversaryNodeState st;
            st.cause = cause;
            st.energy = EnergyState{cause.energy_initial, cause.energy_tx_cost,
                                    cause.energy_rx_cost};
            adversary_states_.emplace(id, st);
        }
    }

    // --- run ---

    void run() {
        if (ran_) throw std::logic_error("Simulation::run called twice");
        ran_ = true;
        refresh_topology();
        const SimTime tick = SimTime::seconds(cfg_.mobility_tick_s);
        if (tick < cfg_.duration()) schedule_mobility_tick(tick);
        schedule_snapshot(SimTime::seconds(1.0));
        for (std::size_t i = 0; i < flows_.size(); ++i) {
            if (flows_[i].start < flows_[i].stop) {
                engine_.schedule(flows_[i].start, EventKind::TrafficTick,
                                 [this, i] { traffic_tick(i); });
            }
        }
        engine_.run_until(cfg_.duration());
        // anything still in flight did not make it
        std::vector<PacketId> open;
        open.reserve(open_packets_.size());
        for (const auto& [id, pkt] : open_packets_) open.push_back(id);
        for (PacketId id : open) {
            auto it = open_packets_.find(id);
            if (it != open_packets_.end()) drop_data(it->second, DropCause::EndOfRun);
        }
        check_invariants();
    }

    // --- Network interface ---

    SimTime now() const override { return engine_.now(); }

    void send_control(NodeId from, std::optional<NodeId> to, ControlMsg msg) override {
        if (node_dead(from)) return;
        ++ledger_.control_transmitted;
        log(LogRecord::Type::CtrlTx);
        const SimTime arrival = now() + hop_delay();
        if (to) {
            if (is_neighbor(from, *to)) {
                engine_.schedule(arrival, EventKind::PacketArrival,
                                 [this, at = *to, msg = std::move(msg), from] {
                                     control_arrival(at, msg, from);
                                 });
            }
            return;
        }
        for (NodeId nbr : adjacency_[from]) {
            engine_.schedule(arrival, EventKind::PacketArrival,
                             [this, nbr, msg, from] { control_arrival(nbr, msg, from); });
        }
    }

    bool unicast_data(NodeId from, NodeId to, const DataPacket& pkt) override {
        resolve_watch(pkt.id, from, WatchOutcome::Forwarded);
        if (node_dead(from)) return true;  // swallowed by a failed node
        if (auto* adv = adversary_state(from);
            adv && adv->cause.kind == CauseKind::EnergyDepletion) {
            adv->energy.debit_tx();
        }
        if (!is_neighbor(from, to)) return false;
        if (to != pkt.dst) start_watch(pkt, from, to);
        engine_.schedule(now() + hop_delay(), EventKind::PacketArrival,
                         [this, to, pkt, from] { data_arrival(to, pkt, from); });
        return true;
    }

    void deliver(NodeId at, const DataPacket& pkt) override {
        resolve_watch(pkt.id, at, WatchOutcome::Forwarded);
        if (finished_.count(pkt.id)) {
            ++ledger_.duplicate_drops;
            return;
        }
        finished_.insert(pkt.id);
        open_packets_.erase(pkt.id);
        --ledger_.in_flight;
        ++ledger_.data_delivered;
        ledger_.delay_samples.push_back((now() - pkt.sent_at).as_seconds());
        log(LogRecord::Type::DataDelivered, pkt.id);
    }

    void drop_data(const DataPacket& pkt, DropCause cause) override {
        resolve_watch(pkt.id, kAnyNode,
                      is_adversary_cause(cause) ? WatchOutcome::Dropped : WatchOutcome::Excused);
        if (finished_.count(pkt.id)) {
            ++ledger_.duplicate_drops;
            return;
        }
        finished_.insert(pkt.id);
        open_packets_.erase(pkt.id);
        --ledger_.in_flight;
        ++ledger_.data_dropped_by_cause[cause];
        log(LogRecord::Type::DataDropped, pkt.id, cause);
    }

    void note_buffered(NodeId at, PacketId id) override {
        resolve_watch(id, at, WatchOutcome::Excused);
    }

    void note_control_loss() override { ++ledger_.control_lost; }

    bool admissible(NodeId watcher, NodeId subject) const override {
        return trust_.admissible(watcher, subject);
    }

    EventHandle schedule_timer(SimTime delay, std::function<void()> action) override {
        return engine_.schedule(now() + delay, EventKind::TimerExpiry, std::move(action));
    }

    void cancel_timer(EventHandle h) override { engine_.cancel(h); }

    // --- results & introspection ---

    const MetricsLedger& ledger() const { return ledger_; }
    MetricsReport report() const {
        return finalize(ledger_, cfg_.payload_bytes, cfg_.duration());
    }
    const EventLog& event_log() const { return log_; }
    const std::vector<DecisionLogRow>& decision_log() const { return decision_log_; }
    const TrustLedger& trust() const { return trust_; }
    const AdversaryProfile& adversary_profile() const { return profile_; }
    const std::vector<CbrFlow>& flows() const { return flows_; }
    const ScenarioConfig& config() const { return cfg_; }
    std::uint64_t invariant_violations() const { return violations_; }
    std::uint64_t data_forwards_by(NodeId node) const {
        auto it = forwards_by_node_.find(node);
        return it == forwards_by_node_.end() ? 0 : it->second;
    }

    const AodvNode* aodv_node(NodeId id) const {
        return id < aodv_nodes_.size() ? aodv_nodes_[id].get() : nullptr;
    }
    const DsrNode* dsr_node(NodeId id) const {
        return id < dsr_nodes_.size() ? dsr_nodes_[id].get() : nullptr;
    }
    const std::vector<WaypointState>& waypoints() const { return states_; }

private:
    static constexpr NodeId kAnyNode = ~NodeId{0};

    enum class WatchOutcome { Forwarded, Dropped, Excused };

    struct Watch {
        NodeId watcher;
        NodeId subject;
        DataPacket pkt;
        EventHandle timeout;
    };

    static StrategyConfig trust_config(const ScenarioConfig& cfg) {
        StrategyConfig tc = cfg.trust;
        tc.strategy = cfg.strategy;
        return tc;
    }

    std::vector<CbrFlow> draw_flows() {
        std::vector<CbrFlow> flows;
        const int k = cfg_.effective_flows();
        const auto n = static_cast<std::uint64_t>(cfg_.nodes);
        for (int i = 0; i < k; ++i) {
            CbrFlow f;
            f.src = static_cast<NodeId>(traffic_rng_.uniform_int(n));
            do {
                f.dst = static_cast<NodeId>(traffic_rng_.uniform_int(n));
            } while (f.dst == f.src);
            f.rate = cfg_.rate_pps;
            f.payload = cfg_.payload_bytes;
            f.start = SimTime::seconds(traffic_rng_.uniform(0.0, 1.0));
            f.stop = cfg_.duration();
            flows.push_back(f);
        }
        return flows;
    }

    void build_agents() {
        agents_.clear();
        aodv_nodes_.clear();
        dsr_nodes_.clear();
        for (NodeId i = 0; i < static_cast<NodeId>(cfg_.nodes); ++i) {
            if (cfg_.protocol == Protocol::Aodv) {
                aodv_nodes_.push_back(std::make_unique<AodvNode>(i, *this, cfg_.aodv));
                agents_.push_back(aodv_nodes_.back().get());
            } else {
                dsr_nodes_.push_back(std::make_unique<DsrNode>(i, *this, cfg_.dsr));
                agents_.push_back(dsr_nodes_.back().get());
            }
        }
    }

    // --- topology ---

    void refresh_topology() {
        positions_.resize(states_.size());
        for (std::size_t i = 0; i < states_.size(); ++i) positions_[i] = states_[i].current;
        adjacency_.assign(states_.size(), {});
        neighbor_matrix_.assign(states_.size(), std::vector<bool>(states_.size(), false));
        for (NodeId i = 0; i < states_.size(); ++i) {
            for (NodeId j = i + 1; j < states_.size(); ++j) {
                if (distance(positions_[i], positions_[j]) <= cfg_.range_m) {
                    adjacency_[i].push_back(j);
                    adjacency_[j].push_back(i);
                    neighbor_matrix_[i][j] = neighbor_matrix_[j][i] = true;
                }
            }
        }
    }

    bool is_neighbor(NodeId a, NodeId b) const { return neighbor_matrix_[a][b]; }

    void schedule_mobility_tick(SimTime at) {
        engine_.schedule(at, EventKind::MobilityUpdate, [this, at] {
            const SimTime dt = SimTime::seconds(cfg_.mobility_tick_s);
            const MobilityConfig mcfg{cfg_.speed_max, SimTime::seconds(cfg_.pause_s)};
            for (auto& s : states_) advance(s, at - dt, dt, cfg_.terrain, mcfg, mobility_rng_);
            refresh_topology();
            for (NodeId i = 0; i < agents_.size(); ++i) {
                agents_[i]->on_mobility_tick(adjacency_[i]);
            }
            const SimTime next = at + dt;
            if (next <= cfg_.duration()) schedule_mobility_tick(next);
        });
    }

    void schedule_snapshot(SimTime at) {
        if (at > cfg_.duration()) return;
        engine_.schedule(at, EventKind::MetricSnapshot, [this, at] {
            check_invariants();
            schedule_snapshot(at + SimTime::seconds(1.0));
        });
    }

    // --- traffic ---

    void traffic_tick(std::size_t flow_idx) {
        const CbrFlow& f = flows_[flow_idx];
        if (now() >= f.stop) return;
        DataPacket pkt;
        pkt.id = ++next_packet_id_;
        pkt.src = f.src;
        pkt.dst = f.dst;
        pkt.sent_at = now();
        pkt.ttl = cfg_.protocol == Protocol::Aodv ? cfg_.aodv.ttl : cfg_.dsr.ttl;
        ++ledger_.data_sent;
        ++ledger_.in_flight;
        open_packets_.emplace(pkt.id, pkt);
        log(LogRecord::Type::DataSent, pkt.id);
        if (node_dead(f.src)) {
            drop_data(pkt, DropCause::NodeFailure);
        } else if (auto* adv = adversary_state(f.src);
                   adv && adv->cause.kind == CauseKind::EnergyDepletion &&
                   !adv->energy.can_transmit()) {
            drop_data(pkt, DropCause::EnergyDepletion);
        } else {
            agents_[f.src]->send_data(pkt);
        }
        const SimTime next = now() + SimTime::seconds(1.0 / f.rate);
        if (next < f.stop) {
            engine_.schedule(next, EventKind::TrafficTick,
                             [this, flow_idx] { traffic_tick(flow_idx); });
        }
    }

    // --- arrivals ---

    void control_arrival(NodeId at, const ControlMsg& msg, NodeId from) {
        if (node_dead(at)) return;
        // messages from eliminated senders are discarded before the
        // routing layer sees them, so they never count as received —
        // their transmissions are pure overhead
        if (!trust_.admissible(at, from)) return;
        // an eliminated receiver still overhears and reacts (it does not
        // honor its own ban), but traffic delivered to it no longer serves
        // the network, so it is not counted as received either
        if (trust_.admissible(from, at)) {
            ++ledger_.control_received;
            log(LogRecord::Type::CtrlRx);
        }
        if (auto* adv = adversary_state(at); adv && adv->cause.kind == CauseKind::BlackHole) {
            if (const auto* rreq = std::get_if<Rreq>(&msg)) {
                if (forged_.insert({at, rreq->origin, rreq->rreq_id}).second) {
                    send_control(at, from, forge_aodv_reply(*rreq));
                }
                return;
            }
            if (const auto* req = std::get_if<DsrRequest>(&msg)) {
                if (forged_.insert({at, req->origin, req->request_id}).second) {
                    send_control(at, from, forge_dsr_reply(*req, at));
                }
                return;
            }
        }
        agents_[at]->handle_control(msg, from);
    }

    void data_arrival(NodeId at, DataPacket pkt, NodeId from) {
        if (node_dead(at)) {
            drop_data(pkt, DropCause::NodeFailure);
            return;
        }
        auto* adv = adversary_state(at);
        if (adv && adv->cause.kind == CauseKind::EnergyDepletion) adv->energy.debit_rx();
        if (pkt.dst == at) {
            agents_[at]->on_data(std::move(pkt), from);
            return;
        }
        if (adv) {
            if (intercept_forward(*adv, now(), from, adversary_rng_) == ForwardVerdict::Drop) {
                drop_data(pkt, drop_cause(adv->cause.kind));
                return;
            }
        }
        ++forwards_by_node_[at];
        agents_[at]->on_data(std::move(pkt), from);
    }

    // --- watchdog / trust ---

    void start_watch(const DataPacket& pkt, NodeId watcher, NodeId subject) {
        resolve_watch(pkt.id, kAnyNode, WatchOutcome::Excused);  // stale watch, if any
        Watch w{watcher, subject, pkt, {}};
        const PacketId id = pkt.id;
        w.timeout = engine_.schedule(now() + SimTime::seconds(cfg_.watchdog_timeout_s),
                                     EventKind::TimerExpiry, [this, id] {
                                         resolve_watch(id, kAnyNode, WatchOutcome::Dropped);
                                     });
        watches_[id] = w;
    }

    // `actor` guards against resolving someone else's watch: Forwarded and
    // Excused resolutions only apply when the acting node is the watched
    // subject (kAnyNode skips the check).
    void resolve_watch(PacketId id, NodeId actor, WatchOutcome outcome) {
        auto it = watches_.find(id);
        if (it == watches_.end()) return;
        const Watch w = it->second;
        if (actor != kAnyNode && actor != w.subject) return;
        engine_.cancel(w.timeout);
        watches_.erase(it);
        if (outcome == WatchOutcome::Excused) return;
        trust_.set_attribution(w.watcher, w.subject, attribution(w.subject));
        TrustRecord& rec = trust_.observe(
            w.watcher, w.subject,
            outcome == WatchOutcome::Forwarded ? Outcome::Forwarded : Outcome::Dropped, now());
        if (outcome == WatchOutcome::Dropped && cfg_.strategy != Strategy::None) {
            const double trust_before = rec.trust;
            const Verdict v = trust_.decide(rec, now());
            if (cfg_.record_decision_log) {
                decision_log_.push_back({now(), w.watcher, w.subject, trust_before, v});
            }
            // The watcher stops routing through a hop it just saw drop,
            // whatever the verdict: an eliminated hop must be routed
            // around, and a pardoned one keeps serving other upstreams
            // without this watcher feeding it the same doomed stream.
            agents_[w.watcher]->on_watch_failure(w.subject, w.pkt);
        }
    }

    CauseClass attribution(NodeId subject) const {
        auto it = profile_.assignments.find(subject);
        return it == profile_.assignments.end() ? CauseClass::Unknown
                                                : classify(it->second.kind);
    }

    // --- adversary plumbing ---

    AdversaryNodeState* adversary_state(NodeId id) {
        auto it = adversary_states_.find(id);
        return it == adversary_states_.end() ? nullptr : &it->second;
    }

    bool node_dead(NodeId id) {
        auto* adv = adversary_state(id);
        return adv && adv->cause.kind == CauseKind::NodeFailure &&
               now() >= adv->cause.failure_onset;
    }

    static DropCause drop_cause(CauseKind k) {
        switch (k) {
            case CauseKind::BlackHole: return DropCause::BlackHole;
            case CauseKind::DeliberateDrop: return DropCause::DeliberateDrop;
            case CauseKind::NodeFailure: return DropCause::NodeFailure;
            case CauseKind::LinkFailure: return DropCause::LinkFailure;
            case CauseKind::EnergyDepletion: return DropCause::EnergyDepletion;
        }
        return DropCause::NoRoute;
    }

    static bool is_adversary_cause(DropCause c) {
        switch (c) {
            case DropCause::BlackHole:
            case DropCause::DeliberateDrop:
            case DropCause::NodeFailure:
            case DropCause::LinkFailure:
            case DropCause::EnergyDepletion:
                return true;
            default:
                return false;
        }
    }

    // --- timing ---

    SimTime hop_delay() {
        return SimTime::millis(2) +
               SimTime::micros(static_cast<std::int64_t>(jitter_rng_.uniform_int(8000)));
    }

    // --- invariant checks (counted, asserted by the acceptance suite) ---

    void check_invariants() {
        if (!ledger_.conserved()) ++violations_;
        for (const auto& [key, rec] : trust_.records()) {
            if (rec.trust < 0.0 || rec.trust > 1.0) ++violations_;
            if (rec.reintegrations > cfg_.trust.max_second_chances) ++violations_;
        }
        if (cfg_.protocol == Protocol::Aodv) check_aodv_loop_freedom();
        else check_dsr_routes();
    }

    // With all valid entries for a destination at the same sequence
    // number, hop counts must strictly decrease along next-hop chains.
    void check_aodv_loop_freedom() {
        std::map<NodeId, std::vector<const AodvRouteEntry*>> by_dest;
        std::map<NodeId, std::map<NodeId, const AodvRouteEntry*>> entry_of;
        for (NodeId i = 0; i < aodv_nodes_.size(); ++i) {
            for (const auto& [dest, e] : aodv_nodes_[i]->table()) {
                if (!e.valid) continue;
                by_dest[dest].push_back(&e);
                entry_of[dest][i] = &e;
            }
        }
        for (const auto& [dest, entries] : by_dest) {
            bool same_seq = true;
            for (const auto* e : entries) {
                if (e->dest_seq != entries.front()->dest_seq) {
                    same_seq = false;
                    break;
                }
            }
            if (!same_seq) continue;
            for (const auto& [node, e] : entry_of[dest]) {
                if (e->next_hop == dest) continue;
                auto jt = entry_of[dest].find(e->next_hop);
                // descent across a misbehaving hop says nothing: black
                // holes forge their advertised distance outright
                if (profile_.assignments.count(e->next_hop)) continue;
                if (jt != entry_of[dest].end() && jt->second->hop_count >= e->hop_count) {
                    ++violations_;
                }
            }
        }
    }

    void check_dsr_routes() {
        for (const auto& node : dsr_nodes_) {
            for (const auto& [dest, routes] : node->cache()) {
                for (const auto& r : routes) {
                    if (!duplicate_free(r.hops) || r.hops.size() < 2) ++violations_;
                }
            }
        }
    }

    void log(LogRecord::Type type, PacketId id = 0, DropCause cause = DropCause::EndOfRun) {
        if (cfg_.record_event_log) log_.push_back({now(), type, id, cause});
    }

    ScenarioConfig cfg_;
    EventQueue engine_;
    RngStream mobility_rng_;
    RngStream traffic_rng_;
    RngStream adversary_rng_;
    RngStream jitter_rng_;
    TrustLedger trust_;

    std::vector<WaypointState> states_;
    std::vector<Position> positions_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<std::vector<bool>> neighbor_matrix_;

    AdversaryProfile profile_;
    std::unordered_map<NodeId, AdversaryNodeState> adversary_states_;
    std::set<std::tuple<NodeId, NodeId, std::uint32_t>> forged_;

    std::vector<RoutingAgent*> agents_;
    std::vector<std::unique_ptr<AodvNode>> aodv_nodes_;
    std::vector<std::unique_ptr<DsrNode>> dsr_nodes_;

    std::vector<CbrFlow> flows_;
    MetricsLedger ledger_;
    EventLog log_;
    std::vector<DecisionLogRow> decision_log_;
    std::unordered_map<PacketId, DataPacket> open_packets_;
    std::unordered_set<PacketId> finished_;
    std::unordered_map<PacketId, Watch> watches_;
    std::unordered_map<NodeId, std::uint64_t> forwards_by_node_;
    PacketId next_packet_id_ = 0;
    std::uint64_t violations_ = 0;
    bool ran_ = false;
};

}  // namespace manetsim
