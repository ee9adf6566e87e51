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

struct DsrParams {
    int max_routes_per_dest = 3;  // freshest kept on eviction
    int request_retries = 2;
    SimTime request_timeout = SimTime::seconds(1.0);  // initial, doubles per retry
    int ttl = 32;
    std::size_t buffer_cap = 64;
    bool salvage = true;          // one re-route attempt per packet
    bool cache_replies = false;   // intermediates answering from cache
    SimTime suspect_window = SimTime::seconds(10.0);  // refuse a hop seen dropping
};

struct CachedRoute {
    std::vector<NodeId> hops;  // source..dest inclusive
    SimTime learned_at;
};

inline bool duplicate_free(const std::vector<NodeId>& hops) {
    std::set<NodeId> seen(hops.begin(), hops.end());
    return seen.size() == hops.size();
}

class DsrNode : public RoutingAgent {
public:
    DsrNode(NodeId self, Network& net, DsrParams params = {})
        : self_(self), net_(net), p_(params) {}

    void send_data(DataPacket pkt) override {
        if (pkt.dst == self_) {
            net_.deliver(self_, pkt);
            return;
        }
        if (const CachedRoute* r = choose_route(pkt.dst)) {
            pkt.route = r->hops;
            source_forward(std::move(pkt));
            return;
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
        source_forward(std::move(pkt));
    }

    void handle_control(const ControlMsg& msg, NodeId from) override {
        if (const auto* req = std::get_if<DsrRequest>(&msg)) handle_request(*req, from);
        else if (const auto* rep = std::get_if<DsrReply>(&msg)) handle_reply(*rep, from);
        else if (const auto* err = std::get_if<DsrError>(&msg)) handle_error(*err, from);
    }

    void on_mobility_tick(const std::vector<NodeId>&) override {
        // DSR learns about broken links on send failure only.
    }

    // Source routing means the origin keeps embedding the bad hop until it
    // hears otherwise, so a local purge alone would leave the stream doomed:
    // report the break back along the route as well.
    void on_watch_failure(NodeId next_hop, const DataPacket& pkt) override {
        purge_link(self_, next_hop);
        // Other flows' embedded routes would keep handing this hop packets;
        // refusing it for a while turns those into normal salvage + error
        // reports instead of repeat drops.
        suspects_[next_hop] = net_.now() + p_.suspect_window;
        const auto pos = std::find(pkt.route.begin(), pkt.route.end(), self_);
        if (pos == pkt.route.end() || pos == pkt.route.begin()) return;
        const auto idx = static_cast<std::size_t>(pos - pkt.route.begin());
        DsrError err;
        err.broken_from = self_;
        err.broken_to = next_hop;
        err.return_route.assign(pkt.route.begin(), pkt.route.begin() + idx + 1);
        std::reverse(err.return_route.begin(), err.return_route.end());
        net_.send_control(self_, pkt.route[idx - 1], std::move(err));
    }

    // Purges every cached route using the directed link and reports the
    // break back toward the packet's origin.
    void maintain_route(NodeId broken_from, NodeId broken_to) {
        purge_link(broken_from, broken_to);
    }

    const std::map<NodeId, std::vector<CachedRoute>>& cache() const { return cache_; }
    std::uint32_t last_request_id() const { return next_request_id_; }
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

    // Admissible routes only; shortest first, freshest on ties.
    const CachedRoute* choose_route(NodeId dest) {
        auto it = cache_.find(dest);
        if (it == cache_.end()) return nullptr;
        const CachedRoute* best = nullptr;
        for (const CachedRoute& r : it->second) {
            if (!route_admissible(r.hops)) continue;
            if (!best || r.hops.size() < best->hops.size() ||
                (r.hops.size() == best->hops.size() && r.learned_at > best->learned_at)) {
                best = &r;
            }
        }
        return best;
    }

    bool route_admissible(const std::vector<NodeId>& hops) const {
        for (std::size_t i = 0; i < hops.size(); ++i) {
            if (hops[i] != self_ && !net_.admissible(self_, hops[i])) return false;
            // the hop we would hand the packet to must not be one we just
            // watched drop: source_forward would refuse it anyway
            if (hops[i] == self_ && i + 1 < hops.size() && suspect(hops[i + 1])) return false;
        }
        return true;
    }

    void source_forward(DataPacket pkt) {
        auto pos = std::find(pkt.route.begin(), pkt.route.end(), self_);
        if (pos == pkt.route.end()) {
            net_.drop_data(pkt, DropCause::NoRoute);
            return;
        }
        if (pos + 1 == pkt.route.end()) {
            net_.deliver(self_, pkt);  // last hop is the destination
            return;
        }
        const NodeId succ = *(pos + 1);
        if (net_.admissible(self_, succ) && !suspect(succ) &&
            net_.unicast_data(self_, succ, pkt)) {
            return;
        }
        on_forward_failure(std::move(pkt), succ);
    }

    void on_forward_failure(DataPacket pkt, NodeId succ) {
        const auto idx = static_cast<std::size_t>(
            std::find(pkt.route.begin(), pkt.route.end(), self_) - pkt.route.begin());
        purge_link(self_, succ);
        if (idx > 0) {
            DsrError err;
            err.broken_from = self_;
            err.broken_to = succ;
            err.return_route.assign(pkt.route.begin(), pkt.route.begin() + idx + 1);
            std::reverse(err.return_route.begin(), err.return_route.end());
            net_.send_control(self_, pkt.route[idx - 1], std::move(err));
        } else {
            // origin: retry from scratch through the normal send path
            pkt.route.clear();
            send_data(std::move(pkt));
            return;
        }
        if (p_.salvage && !pkt.salvaged) {
            if (const CachedRoute* alt = choose_route(pkt.dst)) {
                pkt.salvaged = true;
                pkt.route = alt->hops;
                source_forward(std::move(pkt));
                return;
            }
        }
        net_.drop_data(pkt, DropCause::LinkBreak);
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
            d.timeout = p_.request_timeout;
            originate_request(dest);
        }
    }

    void originate_request(NodeId dest) {
        ++next_request_id_;
        net_.send_control(self_, std::nullopt,
                          DsrRequest{self_, next_request_id_, dest, {self_}});
        Discovery& d = discoveries_[dest];
        d.timer = net_.schedule_timer(d.timeout, [this, dest] { on_request_timeout(dest); });
    }

    void on_request_timeout(NodeId dest) {
        Discovery& d = discoveries_[dest];
        if (!d.active) return;
        if (choose_route(dest)) {
            d.active = false;
            return;
        }
        if (d.attempts < p_.request_retries) {
            ++d.attempts;
            d.timeout = d.timeout + d.timeout;
            originate_request(dest);
            return;
        }
        d.active = false;
        auto it = pending_.find(dest);
        if (it != pending_.end()) {
            for (auto& pkt : it->second) net_.drop_data(pkt, DropCause::NoRoute);
            pending_.erase(it);
        }
    }

    void handle_request(const DsrRequest& req, NodeId from) {
        if (req.origin == self_) return;
        if (std::find(req.accumulated.begin(), req.accumulated.end(), self_) !=
            req.accumulated.end()) {
            return;  // already on this request's path
        }
        if (!seen_requests_.insert({req.origin, req.request_id}).second) return;
        if (req.dest == self_) {
            DsrReply reply;
            reply.route = req.accumulated;
            reply.route.push_back(self_);
            net_.send_control(self_, from, std::move(reply));
            return;
        }
        if (p_.cache_replies) {
            if (const CachedRoute* r = choose_route(req.dest)) {
                std::vector<NodeId> joined = req.accumulated;
                bool clean = true;
                for (NodeId h : r->hops) {
                    if (std::find(joined.begin(), joined.end(), h) != joined.end()) {
                        clean = false;
                        break;
                    }
                    joined.push_back(h);
                }
                if (clean) {
                    net_.send_control(self_, from, DsrReply{std::move(joined)});
                    return;
                }
            }
        }
        DsrRequest fwd = req;
        fwd.accumulated.push_back(self_);
        net_.send_control(self_, std::nullopt, std::move(fwd));
    }

    void handle_reply(const DsrReply& reply, NodeId /*from*/) {
        auto pos = std::find(reply.route.begin(), reply.route.end(), self_);
        if (pos == reply.route.end() || !duplicate_free(reply.route)) return;
        if (pos == reply.route.begin()) {
            const NodeId dest = reply.route.back();
            cache_insert(dest, reply.route);
            // A reply can carry a route we refuse to use (a distrusted or
            // suspect hop on it). Keep the discovery running in that case:
            // ending it here would restart it instantly from the buffered
            // packets and spin against the same unusable answer, so let the
            // request timeout's backoff pace the retries instead.
            Discovery& d = discoveries_[dest];
            if (choose_route(dest)) {
                if (d.active) {
                    d.active = false;
                    net_.cancel_timer(d.timer);
                }
                flush_pending(dest);
            }
            return;
        }
        net_.send_control(self_, *(pos - 1), reply);  // keep walking back to the origin
    }

    void handle_error(const DsrError& err, NodeId /*from*/) {
        purge_link(err.broken_from, err.broken_to);
        auto pos = std::find(err.return_route.begin(), err.return_route.end(), self_);
        if (pos == err.return_route.end() || pos + 1 == err.return_route.end()) return;
        net_.send_control(self_, *(pos + 1), err);
    }

    void cache_insert(NodeId dest, const std::vector<NodeId>& hops) {
        if (hops.size() < 2 || !duplicate_free(hops)) return;
        auto& routes = cache_[dest];
        for (CachedRoute& r : routes) {
            if (r.hops == hops) {
                r.learned_at = net_.now();
                return;
            }
        }
        routes.push_back(CachedRoute{hops, net_.now()});
        if (routes.size() > static_cast<std::size_t>(p_.max_routes_per_dest)) {
            auto oldest = std::min_element(
                routes.begin(), routes.end(),
                [](const CachedRoute& a, const CachedRoute& b) {
                    return a.learned_at < b.learned_at;
                });
            routes.erase(oldest);
        }
    }

    void purge_link(NodeId a, NodeId b) {
        for (auto it = cache_.begin(); it != cache_.end();) {
            auto& routes = it->second;
            routes.erase(std::remove_if(routes.begin(), routes.end(),
                                        [&](const CachedRoute& r) {
                                            for (std::size_t i = 0; i + 1 < r.hops.size(); ++i) {
                                                if (r.hops[i] == a && r.hops[i + 1] == b) {
                                                    return true;
                                                }
                                            }
                                            return false;
                                        }),
                         routes.end());
            it = routes.empty() ? cache_.erase(it) : std::next(it);
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
    DsrParams p_;
    std::uint32_t next_request_id_ = 0;
    std::map<NodeId, std::vector<CachedRoute>> cache_;
    std::set<std::pair<NodeId, std::uint32_t>> seen_requests_;
    std::map<NodeId, Discovery> discoveries_;
    std::map<NodeId, std::deque<DataPacket>> pending_;
    std::map<NodeId, SimTime> suspects_;

    bool suspect(NodeId hop) const {
        auto it = suspects_.find(hop);
        return it != suspects_.end() && net_.now() < it->second;
    }
};

}  // namespace manetsim
