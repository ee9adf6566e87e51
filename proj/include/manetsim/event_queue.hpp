#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "manetsim/sim_time.hpp"

namespace manetsim {

enum class EventKind {
    PacketArrival,
    TimerExpiry,
    MobilityUpdate,
    TrafficTick,
    MetricSnapshot,
};

struct EventHandle {
    std::uint64_t id = 0;
};

enum class CancelResult {
    NotFired,          // cancelled before dispatch
    AlreadyCancelled,
    AlreadyFired,
};

// Deterministic discrete-event queue. Events dispatch in (fire_at, seq)
// order where seq is the insertion counter, so simultaneous events fire
// in the order they were scheduled.
class EventQueue {
public:
    EventHandle schedule(SimTime fire_at, EventKind kind, std::function<void()> action) {
        if (fire_at < clock_) {
            throw std::logic_error("schedule: fire_at is in the past");
        }
        const std::uint64_t seq = next_seq_++;
        pending_.emplace(Key{fire_at, seq}, Entry{kind, std::move(action)});
        index_.emplace(seq, fire_at);
        return EventHandle{seq};
    }

    std::uint64_t run_until(SimTime end) {
        if (end < clock_) {
            throw std::logic_error("run_until: end is in the past");
        }
        std::uint64_t dispatched = 0;
        while (!pending_.empty()) {
            auto it = pending_.begin();
            if (it->first.fire_at > end) break;
            clock_ = it->first.fire_at;
            auto entry = std::move(it->second);
            fired_.insert(it->first.seq);
            index_.erase(it->first.seq);
            pending_.erase(it);
            entry.action();
            ++dispatched;
        }
        clock_ = end;
        return dispatched;
    }

    CancelResult cancel(EventHandle h) {
        if (cancelled_.count(h.id)) return CancelResult::AlreadyCancelled;
        auto idx = index_.find(h.id);
        if (idx == index_.end()) return CancelResult::AlreadyFired;
        pending_.erase(Key{idx->second, h.id});
        index_.erase(idx);
        cancelled_.insert(h.id);
        return CancelResult::NotFired;
    }

    SimTime now() const { return clock_; }
    std::size_t pending_count() const { return pending_.size(); }

private:
    struct Key {
        SimTime fire_at;
        std::uint64_t seq;
        bool operator<(const Key& o) const {
            if (fire_at != o.fire_at) return fire_at < o.fire_at;
            return seq < o.seq;
        }
    };
    struct Entry {
        EventKind kind;
        std::function<void()> action;
    };

    SimTime clock_;
    std::uint64_t next_seq_ = 0;
    std::map<Key, Entry> pending_;
    std::unordered_map<std::uint64_t, SimTime> index_;
    std::unordered_set<std::uint64_t> fired_;
    std::unordered_set<std::uint64_t> cancelled_;
};

}  // namespace manetsim
