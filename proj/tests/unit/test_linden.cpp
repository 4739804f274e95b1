#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "cpq/core/any_queue.hpp"
#include "cpq/core/seq_heap.hpp"
#include "cpq/linden/linden_queue.hpp"
#include "cpq/reclaim/audit.hpp"
#include "cpq/verify/schedule.hpp"
#include "test_support.hpp"

using namespace cpq;
using verify::ScriptedOp;

namespace {

void fill(LindenQueue& q, Key from, Key to) {
    for (Key k = from; k < to; ++k) q.insert(ThreadId(0), Entry{k, k});
}

}  // namespace

TEST(Linden, DeleteMinReturnsSmallestAndEmpties) {
    LindenQueue q;
    for (Key k : {5u, 3u, 8u}) q.insert(ThreadId(0), Entry{k, k});
    EXPECT_EQ(q.delete_min(ThreadId(0))->key, 3u);
    EXPECT_EQ(q.delete_min(ThreadId(0))->key, 5u);
    EXPECT_EQ(q.delete_min(ThreadId(0))->key, 8u);
    EXPECT_FALSE(q.delete_min(ThreadId(0)));
}

TEST(Linden, UncontendedDeleteIsOneFetchAndOr) {
    LindenQueue q(LindenOptions{.bound_offset = 1000});
    fill(q, 0, 100);
    for (int i = 0; i < 50; ++i) q.delete_min(ThreadId(0));
    EXPECT_EQ(q.stats().fao_operations, 50u);
}

TEST(Linden, DeleteWalksTheDeletedPrefix) {
    LindenQueue q(LindenOptions{.bound_offset = 1000});
    fill(q, 0, 100);
    for (int i = 0; i < 10; ++i) q.delete_min(ThreadId(0));
    EXPECT_EQ(q.deleted_prefix_length(), 10u);
    const auto before = q.stats().marked_traversed;
    EXPECT_EQ(q.delete_min(ThreadId(0))->key, 10u);
    EXPECT_EQ(q.stats().marked_traversed - before, 10u);
}

TEST(Linden, RestructureRetiresBoundOffsetNodes) {
    constexpr unsigned kBound = 8;
    LindenQueue q(LindenOptions{.bound_offset = kBound});
    fill(q, 0, 100);
    for (unsigned i = 0; i < kBound; ++i) q.delete_min(ThreadId(0));
    EXPECT_EQ(q.stats().restructures, 0u);
    EXPECT_EQ(q.delete_min(ThreadId(0))->key, kBound);
    EXPECT_EQ(q.stats().restructures, 1u);
    EXPECT_EQ(q.reclaimer().retired_count(), kBound);
    // The head now points at the last claimed node; its successor is live.
    const SkipNode* last = q.head()->next(0).load().ptr();
    EXPECT_EQ(last->order.key, kBound);
    EXPECT_EQ(last->next(0).load().ptr()->order.key, kBound + 1);
    EXPECT_EQ(q.deleted_prefix_length(), 1u);
}

TEST(Linden, HeadStopsAtANodeStillBeingInserted) {
    constexpr unsigned kBound = 4;
    QueueAdapter<LindenQueue> q("linden", LindenOptions{.max_threads = 2, .bound_offset = kBound});
    fill(q.inner(), 10, 40);
    std::vector<verify::ThreadScript> scripts = {{ScriptedOp::insert(1)}, {}};
    for (unsigned i = 0; i < kBound + 2; ++i) scripts[1].push_back(ScriptedOp::delete_min());
    // Thread 1 pops while key 1 is linked at the bottom but not finished.
    auto r = verify::run_schedule(q, scripts,
                                  {verify::run_until(0, "linden.insert.linked"), verify::run_ops(1, kBound + 2)});
    ASSERT_EQ(r.pops[1].size(), kBound + 2);
    EXPECT_EQ(r.pops[1][0]->key, 1u);
    EXPECT_EQ(r.pops[1][1]->key, 10u);
    LindenQueue& lq = q.inner();
    EXPECT_EQ(lq.stats().restructures, 0u);
    EXPECT_EQ(lq.reclaimer().retired_count(), 0u);
    EXPECT_EQ(lq.head()->next(0).load().ptr()->order.key, 1u);
    EXPECT_EQ(lq.deleted_prefix_length(), kBound + 2);
    // With the insert finished the prefix can be cut.
    EXPECT_EQ(lq.delete_min(ThreadId(0))->key, 10u + kBound + 1);
    EXPECT_EQ(lq.stats().restructures, 1u);
    EXPECT_EQ(lq.reclaimer().retired_count(), kBound + 2);
    EXPECT_TRUE(lq.prefix_invariant_holds());
}

TEST(Linden, RestructureFrequencyTracksBoundOffset) {
    for (unsigned bound : {32u, 128u}) {
        LindenQueue q(LindenOptions{.bound_offset = bound});
        fill(q, 0, 20000);
        for (int i = 0; i < 20000; ++i) ASSERT_TRUE(q.delete_min(ThreadId(0)));
        const double expected = 20000.0 / bound;
        EXPECT_GE(q.stats().restructures, 0.8 * expected) << bound;
        EXPECT_LE(q.stats().restructures, 1.2 * expected) << bound;
    }
}

TEST(Linden, MatchesOracleSequentially) {
    LindenQueue q(LindenOptions{.bound_offset = 16});
    SeqOracle oracle;
    std::mt19937_64 rng(12);
    for (int i = 0; i < 50000; ++i) {
        if (rng() & 1) {
            Entry e{static_cast<Key>(rng() % 1000), static_cast<Payload>(i)};
            q.insert(ThreadId(0), e);
            oracle.insert(e);
        } else {
            ASSERT_EQ(q.delete_min(ThreadId(0)), oracle.delete_min());
        }
        if (i % 1000 == 0) ASSERT_TRUE(q.prefix_invariant_holds());
    }
}

TEST(Linden, PrefixInvariantAtQuiescentPoints) {
    constexpr unsigned kThreads = 4;
    LindenQueue q(LindenOptions{.max_threads = kThreads, .bound_offset = 8});
    for (int round = 0; round < 20; ++round) {
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < kThreads; ++t) {
            threads.emplace_back([&, t] {
                std::mt19937_64 rng(round * 17 + t);
                for (int i = 0; i < 2000; ++i) {
                    if (rng() % 2) {
                        q.insert(ThreadId(t), Entry{static_cast<Key>(rng() % 500), 0});
                    } else {
                        q.delete_min(ThreadId(t));
                    }
                }
            });
        }
        for (auto& th : threads) th.join();
        ASSERT_TRUE(q.prefix_invariant_holds()) << round;
        auto live = q.live_entries();
        ASSERT_TRUE(std::is_sorted(live.begin(), live.end(),
                                   [](const Entry& a, const Entry& b) { return a.key < b.key; }));
    }
}

TEST(Linden, MixedWorkloadConservesEntries) {
    LindenQueue q(LindenOptions{.max_threads = 4, .bound_offset = 16});
    auto r = test::run_conservation(q, 4, 40000, 9, 0.5, 1000);
    EXPECT_TRUE(r.ok()) << r.inserted << " vs " << r.popped << " dup " << r.duplicates;
}

TEST(Linden, NoFreedNodeIsTouchedUnderQuarantine) {
    audit::reset_violations();
    {
        LindenQueue q(LindenOptions{.max_threads = 4, .bound_offset = 8, .quarantine = true});
        auto r = test::run_conservation(q, 4, 20000, 10, 0.5, 500);
        EXPECT_TRUE(r.ok());
        EXPECT_GT(q.reclaimer().reclaimed_count(), 0u);
    }
    EXPECT_EQ(audit::violations(), 0u);
}
