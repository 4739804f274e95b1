#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cpq/core/seq_heap.hpp"

using cpq::Entry;
using cpq::SeqHeap;
using cpq::SeqOracle;

TEST(SeqHeap, InsertsThenPopsInOrder) {
    SeqHeap<int> h;
    for (int v : {5, 1, 3}) h.push(v);
    EXPECT_EQ(h.pop(), 1);
    EXPECT_EQ(h.pop(), 3);
    EXPECT_EQ(h.pop(), 5);
    EXPECT_EQ(h.pop(), std::nullopt);
}

TEST(SeqHeap, PopOnEmptyIsEmpty) {
    SeqHeap<int> h;
    EXPECT_FALSE(h.pop().has_value());
    EXPECT_EQ(h.top(), nullptr);
}

TEST(SeqHeap, DuplicateKeysBothReturned) {
    SeqHeap<int> h;
    h.push(2);
    h.push(2);
    EXPECT_EQ(h.pop(), 2);
    EXPECT_EQ(h.pop(), 2);
    EXPECT_TRUE(h.empty());
}

TEST(SeqHeap, DrainMatchesSort) {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 50; ++round) {
        std::vector<std::uint32_t> keys(std::uniform_int_distribution<int>(0, 500)(rng));
        for (auto& k : keys) k = static_cast<std::uint32_t>(rng() % 100);
        SeqHeap<std::uint32_t> h;
        for (auto k : keys) h.push(k);
        std::sort(keys.begin(), keys.end());
        std::vector<std::uint32_t> out;
        while (auto v = h.pop()) out.push_back(*v);
        EXPECT_EQ(out, keys);
    }
}

TEST(SeqHeap, HeapInvariantAfterEveryOperation) {
    std::mt19937_64 rng(11);
    SeqHeap<std::uint32_t> h;
    for (int i = 0; i < 5000; ++i) {
        if (rng() % 3 == 0) {
            h.pop();
        } else {
            h.push(static_cast<std::uint32_t>(rng()));
        }
        ASSERT_TRUE(h.is_heap());
    }
}

TEST(SeqOracle, EqualKeysComeOutInInsertionOrder) {
    SeqOracle q;
    q.insert(Entry{4, 100});
    q.insert(Entry{4, 200});
    q.insert(Entry{1, 300});
    EXPECT_EQ(q.delete_min(), (Entry{1, 300}));
    EXPECT_EQ(q.delete_min(), (Entry{4, 100}));
    EXPECT_EQ(q.delete_min(), (Entry{4, 200}));
    EXPECT_FALSE(q.delete_min());
}

TEST(SeqOracle, SizeTracksInsertsMinusPops) {
    std::mt19937_64 rng(3);
    SeqOracle q;
    std::size_t expected = 0;
    for (int i = 0; i < 10000; ++i) {
        if (rng() & 1) {
            q.insert(Entry{static_cast<std::uint32_t>(rng()), 0});
            ++expected;
        } else if (q.delete_min()) {
            --expected;
        }
        ASSERT_EQ(q.size(), expected);
    }
}
