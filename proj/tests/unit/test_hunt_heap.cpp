#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <future>
#include <random>
#include <thread>

#include "cpq/core/seq_heap.hpp"
#include "cpq/hunt/hunt_heap.hpp"
#include "test_support.hpp"

using namespace cpq;

TEST(HuntHeap, SlotsOfALevelAreBitReversed) {
    std::vector<std::size_t> slots;
    for (std::size_t n = 8; n < 16; ++n) slots.push_back(HuntHeap::slot_for_count(n));
    EXPECT_EQ(slots, (std::vector<std::size_t>{8, 12, 10, 14, 9, 13, 11, 15}));
    EXPECT_EQ(HuntHeap::slot_for_count(1), 1u);
    EXPECT_EQ(HuntHeap::slot_for_count(2), 2u);
    EXPECT_EQ(HuntHeap::slot_for_count(3), 3u);
}

TEST(HuntHeap, NextInsertSlotFollowsSize) {
    HuntHeap h(HuntOptions{1, 64});
    std::vector<std::size_t> slots;
    for (int i = 0; i < 15; ++i) {
        slots.push_back(h.next_insert_slot());
        h.insert(ThreadId(0), Entry{static_cast<Key>(100 - i), 0});
    }
    std::vector<std::size_t> tail(slots.begin() + 7, slots.end());
    EXPECT_EQ(tail, (std::vector<std::size_t>{8, 12, 10, 14, 9, 13, 11, 15}));
}

TEST(HuntHeap, OccupiedSlotsAreAlwaysTheFirstSizeOfTheOrder) {
    HuntHeap h(HuntOptions{1, 100});
    std::mt19937_64 rng(2);
    for (int i = 0; i < 3000; ++i) {
        if (rng() % 2 && h.size() < 100) {
            h.insert(ThreadId(0), Entry{static_cast<Key>(rng()), 0});
        } else {
            h.delete_min(ThreadId(0));
        }
        ASSERT_EQ(h.occupied_slots(), h.size());
        ASSERT_TRUE(h.heap_order_holds());
    }
}

TEST(HuntHeap, InsertsThenDeleteMin) {
    HuntHeap h;
    for (Key k : {5u, 3u, 8u}) h.insert(ThreadId(0), Entry{k, k});
    EXPECT_EQ(h.delete_min(ThreadId(0)), (Entry{3, 3}));
    EXPECT_TRUE(h.heap_order_holds());
    EXPECT_EQ(h.size(), 2u);
}

TEST(HuntHeap, SingleItemPopEmptiesHeap) {
    HuntHeap h;
    h.insert(ThreadId(0), Entry{4, 1});
    EXPECT_EQ(h.delete_min(ThreadId(0)), (Entry{4, 1}));
    EXPECT_EQ(h.size(), 0u);
    EXPECT_FALSE(h.delete_min(ThreadId(0)));
}

TEST(HuntHeap, CapacityExceededAtFullHeap) {
    HuntHeap h(HuntOptions{1, 7});
    for (Key k = 0; k < 7; ++k) h.insert(ThreadId(0), Entry{k, 0});
    EXPECT_THROW(h.insert(ThreadId(0), Entry{9, 0}), CapacityExceeded);
    EXPECT_THROW(h.next_insert_slot(), CapacityExceeded);
    EXPECT_EQ(h.size(), 7u);
    EXPECT_TRUE(h.heap_order_holds());
}

TEST(HuntHeap, DefaultCapacity) {
    EXPECT_EQ(HuntHeap().capacity(), std::size_t{1} << 18);
}

TEST(HuntHeap, MatchesOracleSequentially) {
    HuntHeap h(HuntOptions{1, 1 << 16});
    SeqOracle oracle;
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100000; ++i) {
        if (rng() & 1) {
            Entry e{static_cast<Key>(rng() % 5000), static_cast<Payload>(i)};
            h.insert(ThreadId(0), e);
            oracle.insert(e);
        } else {
            ASSERT_EQ(h.delete_min(ThreadId(0)), oracle.delete_min());
        }
    }
}

TEST(HuntHeap, ConcurrentInsertsThenSortedDrain) {
    constexpr unsigned kThreads = 8;
    HuntHeap h(HuntOptions{kThreads, 1 << 16});
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < kThreads; ++t) {
        threads.emplace_back([&, t] {
            for (Key i = 0; i < 1000; ++i) h.insert(ThreadId(t), Entry{i * kThreads + t, t});
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_TRUE(h.heap_order_holds());
    for (Key expected = 0; expected < 8000; ++expected) {
        auto e = h.delete_min(ThreadId(0));
        ASSERT_TRUE(e);
        ASSERT_EQ(e->key, expected);
    }
    EXPECT_FALSE(h.delete_min(ThreadId(0)));
}

TEST(HuntHeap, MixedWorkloadConservesEntries) {
    HuntHeap h(HuntOptions{4, 1 << 18});
    auto r = test::run_conservation(h, 4, 50000, 3, 0.5, 2000);
    EXPECT_TRUE(r.ok()) << r.inserted << " vs " << r.popped << " dup " << r.duplicates;
}

TEST(HuntHeap, HeapOrderAtQuiescence) {
    HuntHeap h(HuntOptions{4, 1 << 18});
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            std::mt19937_64 rng(t);
            for (int i = 0; i < 20000; ++i) {
                if (rng() % 3) {
                    h.insert(ThreadId(t), Entry{static_cast<Key>(rng()), 0});
                } else {
                    h.delete_min(ThreadId(t));
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_TRUE(h.heap_order_holds());
    EXPECT_EQ(h.occupied_slots(), h.size());
}

TEST(HuntHeap, EveryDeleteAcquiresTheRoot) {
    HuntHeap h(HuntOptions{2, 1 << 12});
    for (Key k = 0; k < 1000; ++k) h.insert(ThreadId(0), Entry{k, 0});
    for (int i = 0; i < 1000; ++i) h.delete_min(ThreadId(i % 2));
    EXPECT_EQ(h.stats().root_acquisitions, 1000u);
}

TEST(HuntHeap, StressCompletesWithinDeadline) {
    // A lock-order violation would show up as a hang here.
    auto done = std::async(std::launch::async, [] {
        HuntHeap h(HuntOptions{8, 1 << 16});
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < 8; ++t) {
            threads.emplace_back([&, t] {
                std::mt19937_64 rng(t * 31);
                for (int i = 0; i < 20000; ++i) {
                    if (rng() % 2 && h.size() < (1 << 15)) {
                        h.insert(ThreadId(t), Entry{static_cast<Key>(rng() % 64), 0});
                    } else {
                        h.delete_min(ThreadId(t));
                    }
                }
            });
        }
        for (auto& th : threads) th.join();
        return h.heap_order_holds();
    });
    ASSERT_EQ(done.wait_for(std::chrono::seconds(120)), std::future_status::ready);
    EXPECT_TRUE(done.get());
}
