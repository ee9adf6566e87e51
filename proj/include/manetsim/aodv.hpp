#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <variant>
#include <vector>

#include "manetsim/routing_agent.hpp"

namespace manetsim {

struct AodvParams {
    SimTime route_lifetime = SimTime::seconds(10.0);
    int rreq_retries = 2;  // re-attempts after the first RREQ
    SimTime rreq_timeout = SimTime::seconds(1.0);  // initial, doubles per retry
    int ttl = 32;
    std::size_t buffer_cap = 64;  // pending data packets per destination
};

struct AodvRouteEntry {
    NodeId dest = 0;
    NodeId next_hop = 0;
    std::uint32_t hop_count = 0;
    std::uint32_t dest_seq = 0;
    SimTime expires_at;
    bool valid = false;
};

class AodvNode : public RoutingAgent {
public:
    AodvNode(NodeId self, Network& net, AodvParams params = {})
        : self_(self), net_(net), p_(params) {}

    void send_data(DataPacket pkt) override {
        if (pkt.dst == self_) {
            net_.deliver(self_, pkt);
            return;
        }
        AodvRouteEntry* e = usable_route(pkt.dst);
        if (e && !net_.admissible(self_, e->next_hop)) {
            invalidate(*e);
            e = nullptr;
        }
        if (e) {
            e->expires_at = net_.now() + p_.route_lifetime;
            const NodeId nh = e->next_hop;
            if (net_.unicast_data(self_, nh, pkt)) return;
            handle_link_break(nh);
        }
        buffer_and_discover(std::move(pkt));
    }

    void on_data(DataPacket pkt, NodeId /*from*/) override {
        if (pkt.dst == self_) {
            net_.deliver(self_, pkt);
            return;
        }
        if (--pkt.ttl <= 0) {
            net_.drop_data(pkt, DropCause::TtlExhausted);
            return;
        }
        send_data(std::move(pkt));
    }

    void handle_control(const ControlMsg& msg, NodeId from) override {
        if (const auto* rreq = std::get_if<Rreq>(&msg)) handle_rreq(*rreq, from);
        else if (const auto* rrep = std::get_if<Rrep>(&msg)) handle_rrep(*rrep, from);
        else if (const auto* rerr = std::get_if<Rerr>(&msg)) handle_rerr(*rerr, from);
    }

    void on_watch_failure(NodeId next_hop, const DataPacket&) override {
        handle_link_break(next_hop);
    }

    void on_mobility_tick(const std::vector<NodeId>& current_neighbors) override {
        std::vector<NodeId> lost;
        for (auto& [dest, e] : table_) {
            if (e.valid &&
                !std::binary_search(current_neighbors.begin(), current_neighbors.end(),
                                    e.next_hop) &&
                std::find(lost.begin(), lost.end(), e.next_hop) == lost.end()) {
                lost.push_back(e.next_hop);
            }
        }
        for (NodeId nh : lost) handle_link_break(nh);
    }

    // Invalidates every valid route through the broken next hop and
    // broadcasts an RERR listing them.
    void handle_link_break(NodeId broken_neighbor) {
        Rerr rerr;
        for (auto& [dest, e] : table_) {
            if (e.valid && e.next_hop == broken_neighbor) {
                invalidate(e);
                rerr.unreachable.emplace_back(dest, e.dest_seq);
            }
        }
        if (!rerr.unreachable.empty()) {
            net_.send_control(self_, std::nullopt, std::move(rerr));
        }
    }

    const std::map<NodeId, AodvRouteEntry>& table() const { return table_; }
    std::uint32_t own_seq() const { return own_seq_; }
    std::uint32_t last_rreq_id() const { return next_rreq_id_; }
    std::size_t pending_count(NodeId dest) const {
        auto it = pending_.find(dest);
        return it == pending_.end() ? 0 : it->second.size();
    }

private:
    struct Discovery {
        bool active = false;
        int attempts = 0;
        SimTime timeout;
        EventHandle timer;
    };

    AodvRouteEntry* usable_route(NodeId dest) {
        auto it = table_.find(dest);
        if (it == table_.end()) return nullptr;
        AodvRouteEntry& e = it->second;
        if (!e.valid || e.expires_at < net_.now()) return nullptr;
        return &e;
    }

    void invalidate(AodvRouteEntry& e) {
        e.valid = false;
        ++e.dest_seq;
    }

    // Standard freshness rule: newer sequence number wins, ties go to
    // fewer hops. A re-advertisement of the current route refreshes it.
    void update_route(NodeId dest, NodeId next_hop, std::uint32_t hop_count,
                      std::uint32_t seq) {
        if (dest == self_) return;
        auto& e = table_[dest];
        // An invalidated entry keeps its (bumped) sequence number precisely
        // so stale claims from before the break stay rejected.
        const bool fresh = seq > e.dest_seq ||
                           (seq == e.dest_seq && (!e.valid || hop_count < e.hop_count));
        const bool same = e.valid && e.next_hop == next_hop && seq >= e.dest_seq;
        if (fresh) {
            e.dest = dest;
            e.next_hop = next_hop;
            e.hop_count = hop_count;
            e.dest_seq = seq;
            e.valid = true;
            e.expires_at = net_.now() + p_.route_lifetime;
        } else if (same) {
            e.expires_at = net_.now() + p_.route_lifetime;
        }
    }

    void buffer_and_discover(DataPacket pkt) {
        auto& q = pending_[pkt.dst];
        if (q.size() >= p_.buffer_cap) {
            net_.drop_data(q.front(), DropCause::BufferOverflow);
            q.pop_front();
        }
        const NodeId dest = pkt.dst;
        net_.note_buffered(self_, pkt.id);
        q.push_back(std::move(pkt));
        Discovery& d = discoveries_[dest];
        if (!d.active) {
            d.active = true;
            d.attempts = 0;
            d.timeout = p_.rreq_timeout;
            originate_rreq(dest);
        }
    }

    void originate_rreq(NodeId dest) {
        ++own_seq_;
        ++next_rreq_id_;
        std::uint32_t known = 0;
        if (auto it = table_.find(dest); it != table_.end()) known = it->second.dest_seq;
        net_.send_control(self_, std::nullopt,
                          Rreq{self_, own_seq_, next_rreq_id_, dest, known, 0});
        Discovery& d = discoveries_[dest];
        d.timer = net_.schedule_timer(d.timeout, [this, dest] { on_rreq_timeout(dest); });
    }

    void on_rreq_timeout(NodeId dest) {
        Discovery& d = discoveries_[dest];
        if (!d.active) return;
        if (usable_route(dest)) {
            d.active = false;
            return;
        }
        if (d.attempts < p_.rreq_retries) {
            ++d.attempts;
            d.timeout = d.timeout + d.timeout;  // binary backoff
            originate_rreq(dest);
            return;
        }
        d.active = false;
        auto it = pending_.find(dest);
        if (it != pending_.end()) {
            for (auto& pkt : it->second) net_.drop_data(pkt, DropCause::NoRoute);
            pending_.erase(it);
        }
    }

    void handle_rreq(const Rreq& rreq, NodeId from) {
        if (rreq.origin == self_) return;
        if (!seen_rreqs_.insert({rreq.origin, rreq.rreq_id}).second) return;
        update_route(rreq.origin, from, rreq.hop_count + 1, rreq.origin_seq);
        if (rreq.dest == self_) {
            // answering with a bumped sequence number keeps every fresh
            // discovery strictly newer than stale entries elsewhere
            own_seq_ = std::max(own_seq_ + 1, rreq.dest_seq_known);
            net_.send_control(self_, from, Rrep{self_, own_seq_, 0, rreq.origin});
            return;
        }
        if (AodvRouteEntry* e = usable_route(rreq.dest);
            e && e->dest_seq >= rreq.dest_seq_known) {
            net_.send_control(self_, from, Rrep{rreq.dest, e->dest_seq, e->hop_count,
                                                rreq.origin});
            return;
        }
        Rreq fwd = rreq;
        ++fwd.hop_count;
        net_.send_control(self_, std::nullopt, fwd);
    }

    void handle_rrep(const Rrep& rrep, NodeId from) {
        update_route(rrep.dest, from, rrep.hop_count + 1, rrep.dest_seq);
        if (rrep.origin == self_) {
            Discovery& d = discoveries_[rrep.dest];
            if (d.active) {
                d.active = false;
                net_.cancel_timer(d.timer);
            }
            flush_pending(rrep.dest);
            return;
        }
        AodvRouteEntry* back = usable_route(rrep.origin);
        if (!back || !net_.admissible(self_, back->next_hop)) {
            net_.note_control_loss();
            return;
        }
        Rrep fwd = rrep;
        ++fwd.hop_count;
        net_.send_control(self_, back->next_hop, fwd);
    }

    void handle_rerr(const Rerr& rerr, NodeId from) {
        Rerr propagated;
        for (const auto& [dest, seq] : rerr.unreachable) {
            auto it = table_.find(dest);
            if (it == table_.end()) continue;
            AodvRouteEntry& e = it->second;
            if (e.valid && e.next_hop == from) {
                e.valid = false;
                e.dest_seq = std::max(e.dest_seq + 1, seq);
                propagated.unreachable.emplace_back(dest, e.dest_seq);
            }
        }
        if (!propagated.unreachable.empty()) {
            net_.send_control(self_, std::nullopt, std::move(propagated));
        }
    }

    void flush_pending(NodeId dest) {
        auto it = pending_.find(dest);
        if (it == pending_.end()) return;
        std::deque<DataPacket> q = std::move(it->second);
        pending_.erase(it);
        for (auto& pkt : q) send_data(std::move(pkt));
    }

    NodeId self_;
    Network& net_;
    AodvParams p_;
    std::uint32_t own_seq_ = 0;
    std::uint32_t next_rreq_id_ = 0;
    std::map<NodeId, AodvRouteEntry> table_;
    std::set<std::pair<NodeId, std::uint32_t>> seen_rreqs_;
    std::map<NodeId, Discovery> discoveries_;
    std::map<NodeId, std::deque<DataPacket>> pending_;
};

}  // namespace manetsim
