#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "manetsim/mobility.hpp"
#include "manetsim/sim_time.hpp"

namespace manetsim {

using PacketId = std::uint64_t;

struct DataPacket {
    PacketId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    SimTime sent_at;
    int ttl = 32;
    std::vector<NodeId> route;  // DSR source route (empty under AODV)
    bool salvaged = false;
};

// --- AODV control messages ---

struct Rreq {
    NodeId origin = 0;
    std::uint32_t origin_seq = 0;
    std::uint32_t rreq_id = 0;
    NodeId dest = 0;
    std::uint32_t dest_seq_known = 0;
    std::uint32_t hop_count = 0;
};

struct Rrep {
    NodeId dest = 0;
    std::uint32_t dest_seq = 0;
    std::uint32_t hop_count = 0;
    NodeId origin = 0;
};

struct Rerr {
    std::vector<std::pair<NodeId, std::uint32_t>> unreachable;  // (dest, dest_seq)
};

// --- DSR control messages ---

struct DsrRequest {
    NodeId origin = 0;
    std::uint32_t request_id = 0;
    NodeId dest = 0;
    std::vector<NodeId> accumulated;  // origin first, duplicate-free
};

struct DsrReply {
    std::vector<NodeId> route;  // full source route, origin..dest
};

struct DsrError {
    NodeId broken_from = 0;
    NodeId broken_to = 0;
    std::vector<NodeId> return_route;  // hop list back toward the origin
};

using ControlMsg = std::variant<Rreq, Rrep, Rerr, DsrRequest, DsrReply, DsrError>;

}  // namespace manetsim
