#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "manetsim/mobility.hpp"
#include "manetsim/sim_time.hpp"

namespace manetsim {

struct CbrFlow {
    NodeId src = 0;
    NodeId dst = 0;
    double rate = 4.0;      // packets per second
    std::uint32_t payload = 512;  // bytes
    SimTime start;
    SimTime stop;
};

enum class DropCause {
    BlackHole,
    DeliberateDrop,
    NodeFailure,
    LinkFailure,
    EnergyDepletion,
    NoRoute,
    TtlExhausted,
    BufferOverflow,
    LinkBreak,
    EndOfRun,
};

inline const char* to_string(DropCause c) {
    switch (c) {
        case DropCause::BlackHole: return "black_hole";
        case DropCause::DeliberateDrop: return "deliberate_drop";
        case DropCause::NodeFailure: return "node_failure";
        case DropCause::LinkFailure: return "link_failure";
        case DropCause::EnergyDepletion: return "energy_depletion";
        case DropCause::NoRoute: return "no_route";
        case DropCause::TtlExhausted: return "ttl_exhausted";
        case DropCause::BufferOverflow: return "buffer_overflow";
        case DropCause::LinkBreak: return "link_break";
        case DropCause::EndOfRun: return "end_of_run";
    }
    return "?";
}

struct MetricsLedger {
    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    std::map<DropCause, std::uint64_t> data_dropped_by_cause;
    std::uint64_t in_flight = 0;
    std::uint64_t duplicate_drops = 0;
    std::uint64_t control_transmitted = 0;
    std::uint64_t control_received = 0;
    std::uint64_t control_lost = 0;  // control messages that could not be relayed
    std::vector<double> delay_samples;

    std::uint64_t total_dropped() const {
        std::uint64_t n = 0;
        for (const auto& [c, k] : data_dropped_by_cause) n += k;
        return n;
    }

    // delivered + dropped + in-flight == sent, at every instant
    bool conserved() const { return data_delivered + total_dropped() + in_flight == data_sent; }
};

struct MetricsReport {
    std::optional<double> pdr;
    std::optional<double> overhead;       // control transmitted / control received
    std::optional<double> overhead_conv;  // control transmitted / data delivered
    std::optional<double> avg_delay;
    double throughput = 0.0;  // delivered payload bytes per second
};

inline std::optional<double> pdr(const MetricsLedger& l) {
    if (l.data_sent == 0) return std::nullopt;
    return static_cast<double>(l.data_delivered) / static_cast<double>(l.data_sent);
}

inline std::optional<double> overhead(const MetricsLedger& l) {
    if (l.control_received == 0) return std::nullopt;
    return static_cast<double>(l.control_transmitted) /
           static_cast<double>(l.control_received);
}

inline MetricsReport finalize(const MetricsLedger& l, std::uint32_t payload, SimTime duration) {
    MetricsReport r;
    r.pdr = pdr(l);
    r.overhead = overhead(l);
    if (l.data_delivered > 0) {
        r.overhead_conv = static_cast<double>(l.control_transmitted) /
                          static_cast<double>(l.data_delivered);
        double sum = 0.0;
        for (double d : l.delay_samples) sum += d;
        r.avg_delay = sum / static_cast<double>(l.delay_samples.size());
    }
    if (duration.count_micros() > 0) {
        r.throughput = static_cast<double>(l.data_delivered) * payload / duration.as_seconds();
    }
    return r;
}

// Raw per-event trace, enough to recount pdr and overhead independently
// of the ledger.
struct LogRecord {
    enum class Type { DataSent, DataDelivered, DataDropped, CtrlTx, CtrlRx };
    SimTime time;
    Type type;
    std::uint64_t packet_id = 0;
    DropCause cause = DropCause::EndOfRun;
};

using EventLog = std::vector<LogRecord>;

}  // namespace manetsim
