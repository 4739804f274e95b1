#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <random>

#include "cpq/core/entry.hpp"
#include "cpq/core/stats.hpp"
#include "cpq/reclaim/epoch.hpp"
#include "cpq/skiplist/skiplist.hpp"

namespace cpq {

struct ShavitLotanOptions {
    unsigned max_threads = 1;
    // When false, delete_min ignores insertion timestamps. Only meant for
    // reproducing the non-linearizable interleaving in tests.
    bool timestamps = true;
    std::uint64_t seed = 1;
    bool quarantine = false;
};

// Skip-list priority queue with a per-node logical deletion flag. delete_min
// walks the bottom level and claims the first unflagged node whose insertion
// timestamp precedes the start of the walk.
class ShavitLotanQueue {
public:
    explicit ShavitLotanQueue(ShavitLotanOptions options = {});

    void insert(ThreadId t, Entry e);
    PopResult delete_min(ThreadId t);

    QueueStats stats() const { return counters_.total(); }
    std::uint64_t clock() const { return clock_.load(); }
    unsigned max_threads() const { return options_.max_threads; }

    SkipList& list() { return list_; }
    EpochReclaimer& reclaimer() { return reclaimer_; }

private:
    struct alignas(64) PerThread {
        std::mt19937_64 rng;
        std::uint64_t next_seq = 0;
    };

    ShavitLotanOptions options_;
    EpochReclaimer reclaimer_;
    CounterSet counters_;
    SkipList list_;
    std::unique_ptr<PerThread[]> local_;
    std::atomic<std::uint64_t> clock_{0};
};

}  // namespace cpq
