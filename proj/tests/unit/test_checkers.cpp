#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "cpq/core/any_queue.hpp"
#include "cpq/core/global_lock_queue.hpp"
#include "cpq/core/seq_heap.hpp"
#include "cpq/verify/checkers.hpp"
#include "cpq/verify/recorder.hpp"
#include "test_support.hpp"

using namespace cpq;
using namespace cpq::verify;
using test::del;
using test::ins;

namespace {

// Replays the witness order and compares every DeleteMin result.
bool witness_replays(const std::vector<Operation>& ops, const Verdict& v) {
    std::vector<Key> s;
    for (std::size_t i : v.witness) {
        const Operation& op = ops[i];
        if (op.op == OpKind::Insert) {
            s.push_back(*op.value);
            continue;
        }
        auto it = std::min_element(s.begin(), s.end());
        if (op.pending()) {
            if (it != s.end()) s.erase(it);
            continue;
        }
        if (!op.value) {
            if (!s.empty()) return false;
            continue;
        }
        if (it == s.end() || *it != *op.value) return false;
        s.erase(it);
    }
    // Every completed operation appears in the witness.
    std::set<std::size_t> in(v.witness.begin(), v.witness.end());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (!ops[i].pending() && !in.count(i)) return false;
    }
    return true;
}

// Three threads each run a few random operations on a recorded queue.
History record_small_run(AnyQueue& inner, std::mt19937_64& rng) {
    Recorder rec(3);
    RecordingQueue q(inner, rec);
    std::vector<std::uint64_t> seeds = {rng(), rng(), rng()};
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < 3; ++t) {
        threads.emplace_back([&, t] {
            std::mt19937_64 local(seeds[t]);
            for (int i = 0; i < 3; ++i) {
                if (local() % 5 < 3) {
                    q.insert(ThreadId(t), Entry{static_cast<Key>(local() % 9), 0});
                } else {
                    q.delete_min(ThreadId(t));
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    while (inner.delete_min(ThreadId(0))) {
    }
    return rec.history();
}

// Rank of each DeleteMin counted directly from the operation intervals.
// Assumes every key is inserted at most once.
std::vector<std::uint64_t> naive_ranks(const std::vector<Operation>& ops) {
    std::map<Key, std::uint64_t> removed_at;  // key -> response time of its pop
    std::vector<std::size_t> pops;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].op == OpKind::DeleteMin && ops[i].value && !ops[i].pending()) {
            pops.push_back(i);
            removed_at[*ops[i].value] = ops[i].respond;
        }
    }
    std::sort(pops.begin(), pops.end(), [&](auto a, auto b) { return ops[a].respond < ops[b].respond; });
    std::vector<std::uint64_t> ranks;
    for (std::size_t p : pops) {
        const Operation& pop = ops[p];
        std::uint64_t rank = 1;
        for (const Operation& op : ops) {
            if (op.op != OpKind::Insert || op.pending() || *op.value >= *pop.value) continue;
            if (op.respond > pop.invoke) continue;
            auto r = removed_at.find(*op.value);
            if (r != removed_at.end() && r->second < pop.respond) continue;
            ++rank;
        }
        ranks.push_back(rank);
    }
    return ranks;
}

}  // namespace

TEST(Linearizability, LiteralLateInsertHistoryIsNotLinearizable) {
    // 5 is present; a DeleteMin spanning two later inserts returns 7 while 3
    // and 5 stay in the queue.
    History h = test::make_history({ins(0, 5, 0, 1), del(1, 7, 2, 9), ins(2, 3, 3, 4), ins(2, 7, 5, 6)});
    EXPECT_FALSE(check_linearizable(h).ok);
    EXPECT_FALSE(check_quiescent(h).ok);
}

TEST(Linearizability, LateInsertHistoryWithFiveClaimedIsOnlyQuiescent) {
    // A second DeleteMin takes 5 before the inserts start.
    History h = test::make_history(
        {ins(0, 5, 0, 1), del(1, 7, 2, 11), del(3, 5, 3, 10), ins(2, 3, 5, 6), ins(2, 7, 7, 8)});
    EXPECT_FALSE(check_linearizable(h).ok);
    auto qc = check_quiescent(h);
    EXPECT_TRUE(qc.ok) << qc.explanation;
    EXPECT_TRUE(witness_replays(pair_operations(h), qc));
}

TEST(Linearizability, SequentialHistoryFromOracle) {
    SeqOracle oracle;
    std::mt19937_64 rng(3);
    std::vector<test::Op> seq;
    std::uint64_t t = 0;
    for (int i = 0; i < 12; ++i) {
        if (rng() % 2) {
            Key k = static_cast<Key>(rng() % 5);
            oracle.insert(Entry{k, 0});
            seq.push_back(ins(0, k, t, t + 1));
        } else {
            auto r = oracle.delete_min();
            seq.push_back(del(0, r ? std::optional<Key>(r->key) : std::nullopt, t, t + 1));
        }
        t += 2;
    }
    History h = test::make_history(seq);
    auto v = check_linearizable(h);
    ASSERT_TRUE(v.ok);
    std::vector<std::size_t> in_order(12);
    std::iota(in_order.begin(), in_order.end(), 0);
    EXPECT_EQ(v.witness, in_order);
}

TEST(Linearizability, AgreesWithBruteForceOnRandomHistories) {
    std::mt19937_64 rng(2024);
    int positives = 0;
    for (int i = 0; i < 1000; ++i) {
        History h = test::random_history(rng, 3, 10);
        auto ops = pair_operations(h);
        auto v = check_linearizable(ops);
        ASSERT_EQ(v.ok, test::brute_force_linearizable(ops)) << i;
        if (v.ok) {
            ++positives;
            ASSERT_TRUE(witness_replays(ops, v)) << i;
        }
    }
    EXPECT_GT(positives, 300);
    EXPECT_LT(positives, 1000);
}

TEST(Linearizability, PendingOperationsAreOptional) {
    // The pending insert may explain the pop; the pending pop may be dropped.
    History h = test::make_history({ins(0, 4, 0, kPending), del(1, 4, 1, 2), del(2, std::nullopt, 3, kPending)});
    EXPECT_TRUE(check_linearizable(h).ok);
    History never = test::make_history({ins(0, 4, 5, kPending), del(1, 4, 1, 2)});
    EXPECT_FALSE(check_linearizable(never).ok);
}

TEST(Linearizability, RefusesHistoriesAboveTheBound) {
    std::vector<test::Op> seq;
    for (std::uint64_t i = 0; i < 15; ++i) seq.push_back(ins(0, static_cast<Key>(i), 2 * i, 2 * i + 1));
    History h = test::make_history(seq);
    EXPECT_THROW(check_linearizable(h), HistoryTooLarge);
    EXPECT_TRUE(check_linearizable(h, 15).ok);
    EXPECT_THROW(check_quiescent(test::make_history({ins(0, 1, 0, 100), ins(1, 2, 1, 99), ins(2, 3, 2, 98),
                                                     ins(3, 4, 3, 97), ins(4, 5, 4, 96)}),
                                 4),
                 HistoryTooLarge);
}

TEST(Linearizability, SecondMinimumBugIsCaught) {
    QueueAdapter<test::SecondMinQueue> buggy("secondmin");
    std::mt19937_64 rng(99);
    int caught = 0;
    for (int i = 0; i < 1000; ++i) {
        if (!check_linearizable(record_small_run(buggy, rng)).ok) ++caught;
    }
    EXPECT_GT(caught, 0);
}

TEST(Linearizability, StrictQueueRunsAreLinearizable) {
    QueueAdapter<GlobalLockQueue> q("globallock", 3);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) EXPECT_TRUE(check_linearizable(record_small_run(q, rng)).ok);
}

TEST(Quiescence, LinearizableImpliesQuiescent) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        History h = test::random_history(rng, 3, 10);
        if (check_linearizable(h).ok) ASSERT_TRUE(check_quiescent(h).ok) << i;
    }
}

TEST(Quiescence, KeyNeverInsertedFails) {
    History h = test::make_history({ins(0, 1, 0, 3), del(1, 8, 1, 2)});
    EXPECT_FALSE(check_quiescent(h).ok);
}

TEST(Quiescence, OrderAcrossQuiescentPointsIsKept) {
    // Both operations overlap: any order. Separated: the pop must see Empty.
    EXPECT_TRUE(check_quiescent(test::make_history({ins(0, 1, 0, 3), del(1, 1, 1, 2)})).ok);
    EXPECT_FALSE(check_quiescent(test::make_history({del(1, 1, 0, 1), ins(0, 1, 2, 3)})).ok);
}

TEST(RankReplay, StrictHistoryHasRankOne) {
    QueueAdapter<GlobalLockQueue> inner("globallock", 1);
    Recorder rec(1);
    RecordingQueue q(inner, rec);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        if (rng() % 2) {
            q.insert(ThreadId(0), Entry{static_cast<Key>(rng() % 100), 0});
        } else {
            q.delete_min(ThreadId(0));
        }
    }
    auto report = rank_replay(rec.history(), 1);
    EXPECT_EQ(report.max_rank, 1u);
    EXPECT_EQ(report.violations, 0u);
    EXPECT_GT(report.ranks.size(), 500u);
}

TEST(RankReplay, HandCountedRank) {
    History h = test::make_history({ins(0, 3, 0, 1), ins(0, 5, 2, 3), ins(0, 7, 4, 5), del(1, 7, 6, 7)});
    auto report = rank_replay(h, 2);
    ASSERT_EQ(report.ranks.size(), 1u);
    EXPECT_EQ(report.ranks[0], 3u);
    EXPECT_EQ(report.violations, 1u);
}

TEST(RankReplay, CountsEmptyAndUnknownResults) {
    History h = test::make_history({del(0, std::nullopt, 0, 1), del(0, 4, 2, 3), ins(1, 6, 4, 5)});
    auto report = rank_replay(h);
    EXPECT_EQ(report.empty_pops, 1u);
    EXPECT_EQ(report.unknown_keys, 1u);
}

TEST(RankReplay, ResultMayComeFromARunningInsert) {
    History h = test::make_history({ins(0, 2, 0, 1), ins(1, 9, 2, 8), del(2, 9, 3, 4), del(2, 2, 5, 6)});
    auto report = rank_replay(h);
    EXPECT_EQ(report.unknown_keys, 0u);
    EXPECT_EQ(report.ranks, (std::vector<std::uint64_t>{2, 1}));
}

TEST(RankReplay, AgreesWithIntervalCount) {
    std::mt19937_64 rng(77);
    int compared = 0;
    for (int i = 0; i < 2000; ++i) {
        History h = test::random_history(rng, 3, 12, 1.0, 1000);
        auto ops = pair_operations(h);
        std::set<Key> keys;
        bool distinct = true;
        for (const auto& op : ops) {
            if (op.op == OpKind::Insert) distinct = distinct && keys.insert(*op.value).second;
        }
        if (!distinct) continue;
        auto report = rank_replay(h);
        ASSERT_EQ(report.unknown_keys, 0u) << i;
        ASSERT_EQ(report.ranks, naive_ranks(ops)) << i;
        ++compared;
    }
    EXPECT_GT(compared, 1500);
}
