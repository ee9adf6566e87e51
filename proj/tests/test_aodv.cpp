#include <gtest/gtest.h>

#include "manetsim/aodv.hpp"
#include "test_support.hpp"

using namespace manetsim;
using manetsim::testing::TestNet;
using manetsim::testing::make_packet;

namespace {

const Rreq* as_rreq(const ControlMsg& m) { return std::get_if<Rreq>(&m); }
const Rrep* as_rrep(const ControlMsg& m) { return std::get_if<Rrep>(&m); }
const Rerr* as_rerr(const ControlMsg& m) { return std::get_if<Rerr>(&m); }

}  // namespace

TEST(AodvOriginate, FirstRequestHasHopZeroAndId1) {
    TestNet net;
    AodvNode node(0, net);
    node.send_data(make_packet(1, 0, 5));
    ASSERT_EQ(net.control.size(), 1u);
    const Rreq* rreq = as_rreq(net.control[0].msg);
    ASSERT_NE(rreq, nullptr);
    EXPECT_EQ(rreq->hop_count, 0u);
    EXPECT_EQ(rreq->rreq_id, 1u);
    EXPECT_EQ(rreq->origin, 0u);
    EXPECT_EQ(rreq->dest, 5u);
    EXPECT_FALSE(net.control[0].to.has_value());  // broadcast
    EXPECT_EQ(net.buffered.size(), 1u);
}

TEST(AodvOriginate, RetryAfterTimeoutDoublesBackoff) {
    TestNet net;
    AodvNode node(0, net);
    node.send_data(make_packet(1, 0, 5));
    net.queue.run_until(SimTime::seconds(1.0));  // first timeout
    ASSERT_EQ(net.control.size(), 2u);
    EXPECT_EQ(as_rreq(net.control[1].msg)->rreq_id, 2u);
    // second retry fires only after a doubled 2 s window
    net.queue.run_until(SimTime::seconds(2.5));
    EXPECT_EQ(net.control.size(), 2u);
    net.queue.run_until(SimTime::seconds(3.0));
    ASSERT_EQ(net.control.size(), 3u);
    EXPECT_EQ(as_rreq(net.control[2].msg)->rreq_id, 3u);
    // retry limit 2: after the last window the buffer is dropped
    net.queue.run_until(SimTime::seconds(7.0));
    ASSERT_EQ(net.drops.size(), 1u);
    EXPECT_EQ(net.drops[0].second, DropCause::NoRoute);
}

TEST(AodvOriginate, ValidRouteSkipsDiscovery) {
    TestNet net;
    AodvNode node(0, net);
    node.handle_control(Rrep{5, 3, 0, 0}, 2);  // installs route to 5 via 2
    node.send_data(make_packet(1, 0, 5));
    EXPECT_TRUE(net.control.empty());
    ASSERT_EQ(net.data.size(), 1u);
    EXPECT_EQ(net.data[0].to, 2u);
}

TEST(AodvOriginate, BufferOverflowDropsOldest) {
    TestNet net;
    AodvParams p;
    p.buffer_cap = 2;
    AodvNode node(0, net, p);
    node.send_data(make_packet(1, 0, 5));
    node.send_data(make_packet(2, 0, 5));
    node.send_data(make_packet(3, 0, 5));
    ASSERT_EQ(net.drops.size(), 1u);
    EXPECT_EQ(net.drops[0].first.id, 1u);
    EXPECT_EQ(net.drops[0].second, DropCause::BufferOverflow);
}

TEST(AodvHandleRreq, DuplicateIgnored) {
    TestNet net;
    AodvNode node(1, net);
    const Rreq rreq{0, 1, 1, 5, 0, 0};
    node.handle_control(rreq, 0);
    node.handle_control(rreq, 0);
    EXPECT_EQ(net.control.size(), 1u);  // one rebroadcast only
}

TEST(AodvHandleRreq, DestinationRepliesWithMaxSeq) {
    TestNet net;
    AodvNode node(5, net);
    node.handle_control(Rreq{0, 1, 1, 5, 7, 2}, 3);
    ASSERT_EQ(net.control.size(), 1u);
    const Rrep* rrep = as_rrep(net.control[0].msg);
    ASSERT_NE(rrep, nullptr);
    EXPECT_EQ(rrep->dest, 5u);
    EXPECT_GE(rrep->dest_seq, 7u);  // own seq raised to at least the requested
    EXPECT_EQ(rrep->hop_count, 0u);
    EXPECT_EQ(net.control[0].to, std::optional<NodeId>(3));
    // reverse route to the origin was installed
    ASSERT_TRUE(node.table().count(0));
    EXPECT_EQ(node.table().at(0).next_hop, 3u);
    EXPECT_EQ(node.table().at(0).hop_count, 3u);
}

TEST(AodvHandleRreq, IntermediateRebroadcastsAndInstallsReverseRoute) {
    TestNet net;
    AodvNode node(1, net);
    node.handle_control(Rreq{0, 1, 1, 5, 0, 2}, 7);
    ASSERT_EQ(net.control.size(), 1u);
    const Rreq* fwd = as_rreq(net.control[0].msg);
    ASSERT_NE(fwd, nullptr);
    EXPECT_EQ(fwd->hop_count, 3u);
    EXPECT_EQ(node.table().at(0).hop_count, 3u);
    EXPECT_EQ(node.table().at(0).next_hop, 7u);
}

TEST(AodvHandleRreq, IntermediateWithFreshRouteReplies) {
    TestNet net;
    AodvNode node(1, net);
    node.handle_control(Rrep{5, 9, 1, 1}, 2);  // route to 5 via 2, seq 9, 2 hops
    net.control.clear();
    node.handle_control(Rreq{0, 1, 1, 5, 4, 0}, 0);
    ASSERT_EQ(net.control.size(), 1u);
    const Rrep* rrep = as_rrep(net.control[0].msg);
    ASSERT_NE(rrep, nullptr);
    EXPECT_EQ(rrep->dest_seq, 9u);
    EXPECT_EQ(rrep->hop_count, 2u);
}

TEST(AodvHandleRrep, OriginFlushesPendingOnFirstReply) {
    TestNet net;
    AodvNode node(0, net);
    node.send_data(make_packet(1, 0, 5));
    node.send_data(make_packet(2, 0, 5));
    node.handle_control(Rrep{5, 3, 1, 0}, 2);
    ASSERT_EQ(net.data.size(), 2u);
    EXPECT_EQ(net.data[0].pkt.id, 1u);
    EXPECT_EQ(net.data[1].pkt.id, 2u);
    EXPECT_EQ(net.data[0].to, 2u);
}

TEST(AodvHandleRrep, FreshnessRules) {
    TestNet net;
    AodvNode node(0, net);
    node.handle_control(Rrep{5, 3, 1, 0}, 2);  // seq 3, 2 hops via 2
    // same seq, more hops: ignored
    node.handle_control(Rrep{5, 3, 4, 0}, 7);
    EXPECT_EQ(node.table().at(5).next_hop, 2u);
    // higher seq replaces even with more hops
    node.handle_control(Rrep{5, 8, 4, 0}, 9);
    EXPECT_EQ(node.table().at(5).next_hop, 9u);
    EXPECT_EQ(node.table().at(5).hop_count, 5u);
}

TEST(AodvHandleRrep, MissingReverseRouteCountsControlLoss) {
    TestNet net;
    AodvNode node(1, net);
    node.handle_control(Rrep{5, 3, 0, 0}, 2);  // origin 0 unknown here
    EXPECT_EQ(net.control_losses, 1);
}

TEST(AodvLinkBreak, RerrListsExactlyInvalidatedRoutes) {
    TestNet net;
    AodvNode node(0, net);
    node.handle_control(Rrep{5, 3, 1, 0}, 2);
    node.handle_control(Rrep{6, 3, 1, 0}, 2);
    node.handle_control(Rrep{7, 3, 1, 0}, 3);
    net.control.clear();
    node.handle_link_break(2);
    ASSERT_EQ(net.control.size(), 1u);
    const Rerr* rerr = as_rerr(net.control[0].msg);
    ASSERT_NE(rerr, nullptr);
    EXPECT_EQ(rerr->unreachable.size(), 2u);
    EXPECT_FALSE(node.table().at(5).valid);
    EXPECT_FALSE(node.table().at(6).valid);
    EXPECT_TRUE(node.table().at(7).valid);
    // no routes via that hop -> no RERR
    net.control.clear();
    node.handle_link_break(2);
    EXPECT_TRUE(net.control.empty());
}

TEST(AodvForward, DeliversBufferedOrForwards) {
    TestNet net;
    AodvNode node(5, net);
    node.on_data(make_packet(1, 0, 5), 3);
    ASSERT_EQ(net.delivered.size(), 1u);
    EXPECT_EQ(net.delivered[0].first, 5u);
}

TEST(AodvForward, TtlExhaustionDrops) {
    TestNet net;
    AodvNode node(1, net);
    node.on_data(make_packet(1, 0, 5, 1), 0);
    ASSERT_EQ(net.drops.size(), 1u);
    EXPECT_EQ(net.drops[0].second, DropCause::TtlExhausted);
}

TEST(AodvForward, NoRouteBuffersAndDiscovers) {
    TestNet net;
    AodvNode node(1, net);
    node.on_data(make_packet(1, 0, 5), 0);
    EXPECT_EQ(net.buffered.size(), 1u);
    ASSERT_EQ(net.control.size(), 1u);
    EXPECT_NE(as_rreq(net.control[0].msg), nullptr);
}

TEST(AodvForward, EliminatedNextHopTriggersRediscovery) {
    TestNet net;
    AodvNode node(0, net);
    node.handle_control(Rrep{5, 3, 1, 0}, 2);
    net.eliminated.insert(2);
    node.send_data(make_packet(1, 0, 5));
    EXPECT_TRUE(net.data.empty());
    EXPECT_EQ(net.buffered.size(), 1u);
    EXPECT_FALSE(node.table().at(5).valid);
}

TEST(AodvForward, SendFailureRaisesLinkBreakThenRediscovers) {
    TestNet net;
    AodvNode node(0, net);
    node.handle_control(Rrep{5, 3, 1, 0}, 2);
    net.cut(0, 2);
    node.send_data(make_packet(1, 0, 5));
    // RERR for the broken route plus a fresh RREQ
    ASSERT_EQ(net.control.size(), 2u);
    EXPECT_NE(as_rerr(net.control[0].msg), nullptr);
    EXPECT_NE(as_rreq(net.control[1].msg), nullptr);
    EXPECT_EQ(net.buffered.size(), 1u);
}

TEST(AodvSequence, OwnSeqNonDecreasing) {
    TestNet net;
    AodvNode node(0, net);
    std::uint32_t last = node.own_seq();
    for (int i = 0; i < 5; ++i) {
        node.send_data(make_packet(static_cast<PacketId>(i + 1), 0, 5 + static_cast<NodeId>(i)));
        EXPECT_GE(node.own_seq(), last);
        last = node.own_seq();
    }
}

TEST(AodvRerr, PropagatesOnlyWhenRoutesInvalidated) {
    TestNet net;
    AodvNode node(1, net);
    node.handle_control(Rrep{5, 3, 1, 0}, 2);
    net.control.clear();
    node.handle_control(Rerr{{{5, 4}}}, 2);
    ASSERT_EQ(net.control.size(), 1u);  // re-broadcast for the lost dest
    EXPECT_FALSE(node.table().at(5).valid);
    net.control.clear();
    node.handle_control(Rerr{{{5, 4}}}, 2);
    EXPECT_TRUE(net.control.empty());  // nothing newly invalidated
}
