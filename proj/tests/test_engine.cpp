#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "manetsim/event_queue.hpp"
#include "manetsim/rng.hpp"

using namespace manetsim;

TEST(EventQueue, ScheduleAtCurrentTimeFiresFirst) {
    EventQueue q;
    std::vector<int> order;
    q.schedule(SimTime::micros(0), EventKind::TimerExpiry, [&] { order.push_back(1); });
    q.schedule(SimTime::seconds(1.0), EventKind::TimerExpiry, [&] { order.push_back(2); });
    q.run_until(SimTime::seconds(2.0));
    EXPECT_EQ(order, (std::vector<int>{1, 2}));
}

TEST(EventQueue, SimultaneousEventsDispatchInScheduleOrder) {
    EventQueue q;
    std::vector<char> order;
    q.schedule(SimTime::seconds(5.0), EventKind::TimerExpiry, [&] { order.push_back('A'); });
    q.schedule(SimTime::seconds(5.0), EventKind::TimerExpiry, [&] { order.push_back('B'); });
    q.run_until(SimTime::seconds(5.0));
    EXPECT_EQ(order, (std::vector<char>{'A', 'B'}));
}

TEST(EventQueue, SchedulingInThePastIsAProgrammingError) {
    EventQueue q;
    q.run_until(SimTime::seconds(4.0));
    EXPECT_THROW(
        q.schedule(SimTime::seconds(3.0), EventKind::TimerExpiry, [] {}),
        std::logic_error);
}

TEST(EventQueue, RunUntilOnEmptyQueueAdvancesClock) {
    EventQueue q;
    EXPECT_EQ(q.run_until(SimTime::seconds(10.0)), 0u);
    EXPECT_EQ(q.now(), SimTime::seconds(10.0));
}

TEST(EventQueue, RunUntilStopsAtBoundaryInclusive) {
    EventQueue q;
    int fired = 0;
    for (int t = 1; t <= 3; ++t) {
        q.schedule(SimTime::seconds(t), EventKind::TimerExpiry, [&] { ++fired; });
    }
    EXPECT_EQ(q.run_until(SimTime::seconds(2.0)), 2u);
    EXPECT_EQ(fired, 2);
}

TEST(EventQueue, ChildScheduledAtSameTimeRunsWithinSameCall) {
    EventQueue q;
    std::vector<int> order;
    q.schedule(SimTime::seconds(1.0), EventKind::TimerExpiry, [&] {
        order.push_back(1);
        q.schedule(q.now(), EventKind::TimerExpiry, [&] { order.push_back(2); });
    });
    q.run_until(SimTime::seconds(1.0));
    EXPECT_EQ(order, (std::vector<int>{1, 2}));
}

TEST(EventQueue, CancelSemantics) {
    EventQueue q;
    bool fired = false;
    auto h = q.schedule(SimTime::seconds(1.0), EventKind::TimerExpiry, [&] { fired = true; });
    EXPECT_EQ(q.cancel(h), CancelResult::NotFired);
    EXPECT_EQ(q.cancel(h), CancelResult::AlreadyCancelled);
    q.run_until(SimTime::seconds(2.0));
    EXPECT_FALSE(fired);

    auto h2 = q.schedule(SimTime::seconds(3.0), EventKind::TimerExpiry, [] {});
    q.run_until(SimTime::seconds(3.0));
    EXPECT_EQ(q.cancel(h2), CancelResult::AlreadyFired);
}

TEST(EventQueue, DispatchOrderMatchesOfflineSort) {
    RngStream rng(7, "test");
    EventQueue q;
    std::vector<std::pair<std::int64_t, int>> scheduled;  // (time, idx)
    std::vector<int> dispatched;
    for (int i = 0; i < 500; ++i) {
        const auto t = static_cast<std::int64_t>(rng.uniform_int(1000));
        scheduled.emplace_back(t, i);
        q.schedule(SimTime::micros(t), EventKind::TimerExpiry,
                   [&dispatched, i] { dispatched.push_back(i); });
    }
    q.run_until(SimTime::micros(1000));
    std::stable_sort(scheduled.begin(), scheduled.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < scheduled.size(); ++i) {
        EXPECT_EQ(dispatched[i], scheduled[i].second);
    }
}

TEST(EventQueue, ClockNeverDecreases) {
    RngStream rng(11, "test");
    EventQueue q;
    SimTime last;
    bool monotonic = true;
    for (int i = 0; i < 200; ++i) {
        q.schedule(SimTime::micros(static_cast<std::int64_t>(rng.uniform_int(5000))),
                   EventKind::TimerExpiry, [&] {
                       if (q.now() < last) monotonic = false;
                       last = q.now();
                   });
    }
    q.run_until(SimTime::micros(5000));
    EXPECT_TRUE(monotonic);
}

TEST(RngStream, SameSeedSameSequence) {
    RngStream a(42, "mobility");
    RngStream b(42, "mobility");
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(RngStream, StreamsAreIndependentByLabel) {
    RngStream a(42, "mobility");
    RngStream b(42, "traffic");
    int equal = 0;
    for (int i = 0; i < 100; ++i) {
        if (a.next() == b.next()) ++equal;
    }
    EXPECT_EQ(equal, 0);
}
