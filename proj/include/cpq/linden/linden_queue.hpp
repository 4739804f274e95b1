#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "cpq/core/entry.hpp"
#include "cpq/core/stats.hpp"
#include "cpq/reclaim/epoch.hpp"
#include "cpq/skiplist/node.hpp"

namespace cpq {

struct LindenOptions {
    unsigned max_threads = 1;
    // Length of the logically deleted prefix a delete_min may walk before it
    // tries to restructure.
    unsigned bound_offset = 32;
    std::uint64_t seed = 1;
    bool quarantine = false;
};

// Skip-list priority queue with minimal contention on delete_min. A mark in a
// node's bottom successor word means "my successor is deleted", so deleted
// nodes always form a prefix of the bottom level. delete_min claims a node
// with a single fetch-and-or; the prefix is cut off in batches once it grows
// past bound_offset.
class LindenQueue {
public:
    explicit LindenQueue(LindenOptions options = {});
    ~LindenQueue();

    LindenQueue(const LindenQueue&) = delete;
    LindenQueue& operator=(const LindenQueue&) = delete;

    void insert(ThreadId t, Entry e);
    PopResult delete_min(ThreadId t);

    QueueStats stats() const { return counters_.total(); }
    unsigned bound_offset() const { return options_.bound_offset; }
    EpochReclaimer& reclaimer() { return reclaimer_; }

    // Quiescent inspection.
    const SkipNode* head() const { return head_; }
    const SkipNode* tail() const { return tail_; }
    bool prefix_invariant_holds() const;
    std::size_t deleted_prefix_length() const;
    std::vector<Entry> live_entries() const;

private:
    struct alignas(64) PerThread {
        std::mt19937_64 rng;
        std::uint64_t next_seq = 0;
    };

    SkipNode* locate_preds(const OrderKey& target, SkipNode** preds, SkipNode** succs) const;
    void restructure(ThreadId t);

    LindenOptions options_;
    EpochReclaimer reclaimer_;
    CounterSet counters_;
    std::unique_ptr<PerThread[]> local_;
    SkipNode* head_;
    SkipNode* tail_;
};

}  // namespace cpq
