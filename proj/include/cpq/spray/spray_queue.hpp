#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <utility>

#include "cpq/core/entry.hpp"
#include "cpq/core/stats.hpp"
#include "cpq/reclaim/epoch.hpp"
#include "cpq/skiplist/skiplist.hpp"

namespace cpq {

struct SprayParams {
    int start_height = 1;            // H
    unsigned max_jump = 1;           // M: each level takes 0..M steps
    int descent = 1;                 // D: levels dropped per step
    std::size_t dummy_count = 1;     // padding nodes ahead of the real keys
    double cleaner_probability = 1;  // chance a collision turns into a cleanup pass
    unsigned respray_limit = 16;     // sprays before falling back to a linear scan
    std::size_t cleaner_span = 4;    // bottom-level nodes a cleaner visits

    // H = ceil(log2 P) + 1, M = ceil(log2(P+1)^3), D = 1, P*M dummies.
    static SprayParams for_threads(unsigned p);
};

struct SprayOptions {
    unsigned max_threads = 1;
    // Number of threads the spray width is tuned for; 0 means max_threads.
    unsigned spray_threads = 0;
    std::optional<SprayParams> params;
    std::uint64_t seed = 1;
    bool quarantine = false;
};

// Relaxed priority queue: delete_min performs a random descending walk over
// the skip list and claims the node it lands on, so concurrent deleters spread
// over a prefix of the list instead of contending for the head.
class SprayQueue {
public:
    explicit SprayQueue(SprayOptions options = {});

    void insert(ThreadId t, Entry e);
    PopResult delete_min(ThreadId t);

    // Inserts with a fixed tower height, for building deterministic layouts.
    void insert_with_level(ThreadId t, Entry e, int level);

    // One random walk using the calling thread's generator. Never returns the
    // head; a walk that stays on the head lands on its bottom successor.
    SkipNode* spray(ThreadId t);

    // Walk with caller-chosen step counts: `steps(level)` must return a value
    // in [0, max_jump].
    template <class Steps>
    SkipNode* spray_walk(Steps&& steps);

    const SprayParams& params() const { return params_; }
    QueueStats stats() const { return counters_.total(); }
    SkipList& list() { return list_; }
    EpochReclaimer& reclaimer() { return reclaimer_; }

private:
    struct alignas(64) PerThread {
        std::mt19937_64 rng;
        std::uint64_t next_seq = 0;
    };

    void clean(const EpochReclaimer::Guard& g);
    bool try_claim(SkipNode* n);

    SprayOptions options_;
    SprayParams params_;
    EpochReclaimer reclaimer_;
    CounterSet counters_;
    SkipList list_;
    std::unique_ptr<PerThread[]> local_;
};

template <class Steps>
SkipNode* SprayQueue::spray_walk(Steps&& steps) {
    SkipNode* x = list_.head();
    SkipNode* const tail = list_.tail();
    int level = params_.start_height < kMaxLevel ? params_.start_height : kMaxLevel;
    for (;;) {
        const unsigned jumps = steps(level);
        for (unsigned j = 0; j < jumps; ++j) {
            x->audit();
            SkipNode* nx = x->next(level).load().ptr();
            if (nx == tail) break;
            x = nx;
        }
        if (level == 0) break;
        level = level > params_.descent ? level - params_.descent : 0;
    }
    if (x == list_.head()) x = x->next(0).load().ptr();
    return x;
}

}  // namespace cpq
