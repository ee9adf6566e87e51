#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "manetsim/event_queue.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/packet.hpp"

namespace manetsim {

// Services the simulator provides to a routing agent. Transmission
// success is decided against the current topology snapshot; arrivals are
// delivered as later events.
class Network {
public:
    virtual ~Network() = default;

    virtual SimTime now() const = 0;

    // nullopt target = local broadcast to all current neighbors.
    virtual void send_control(NodeId from, std::optional<NodeId> to, ControlMsg msg) = 0;

    // Hands a data packet to the link layer. Returns false when the
    // target is out of range, which the caller treats as a link break.
    virtual bool unicast_data(NodeId from, NodeId to, const DataPacket& pkt) = 0;

    // Terminal packet outcomes.
    virtual void deliver(NodeId at, const DataPacket& pkt) = 0;
    virtual void drop_data(const DataPacket& pkt, DropCause cause) = 0;

    // Packet parked in a pending buffer awaiting route discovery.
    virtual void note_buffered(NodeId at, PacketId id) = 0;

    // Control message received but impossible to relay further.
    virtual void note_control_loss() = 0;

    // Trust-layer admissibility of a prospective next hop.
    virtual bool admissible(NodeId watcher, NodeId subject) const = 0;

    virtual EventHandle schedule_timer(SimTime delay, std::function<void()> action) = 0;
    virtual void cancel_timer(EventHandle h) = 0;
};

}  // namespace manetsim
