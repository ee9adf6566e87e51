#pragma once

#include <vector>

#include "manetsim/net.hpp"
#include "manetsim/packet.hpp"

namespace manetsim {

// Per-node routing state machine. All handlers run synchronously inside
// the single-threaded event loop.
class RoutingAgent {
public:
    virtual ~RoutingAgent() = default;

    // Packet originated here, or re-entering custody after discovery.
    virtual void send_data(DataPacket pkt) = 0;

    // Data packet arrived from a neighbor (adversary verdicts already applied).
    virtual void on_data(DataPacket pkt, NodeId from) = 0;

    virtual void handle_control(const ControlMsg& msg, NodeId from) = 0;

    // Watchdog verdict: the named next hop failed to forward the packet we
    // handed it. The agent stops routing through that hop (mitigation
    // strategies only; under strategy=none nothing reacts).
    virtual void on_watch_failure(NodeId /*next_hop*/, const DataPacket& /*pkt*/) {}

    // Fresh neighbor snapshot after a mobility tick.
    virtual void on_mobility_tick(const std::vector<NodeId>& current_neighbors) = 0;
};

}  // namespace manetsim
