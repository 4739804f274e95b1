#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>

#include "cpq/core/entry.hpp"
#include "cpq/core/seq_heap.hpp"
#include "cpq/core/stats.hpp"
#include "cpq/reclaim/audit.hpp"
#include "cpq/reclaim/epoch.hpp"

namespace cpq {

struct KRelaxedOptions {
    unsigned max_threads = 1;
    unsigned k = 64;
    std::uint64_t seed = 1;
    bool quarantine = false;
};

// Hybrid k-relaxed priority queue. Each thread buffers up to k fresh items in
// a local list before appending them to a shared list of batches; every
// thread keeps a private heap over all items it has seen and claims items with
// a per-item flag. A delete_min can miss at most k - 1 unpublished items per
// other thread, which bounds the rank of any returned key by k * P.
class KRelaxedQueue {
public:
    explicit KRelaxedQueue(KRelaxedOptions options = {});
    ~KRelaxedQueue();

    KRelaxedQueue(const KRelaxedQueue&) = delete;
    KRelaxedQueue& operator=(const KRelaxedQueue&) = delete;

    void insert(ThreadId t, Entry e);
    PopResult delete_min(ThreadId t);

    // Appends the calling thread's local list to the shared list (if
    // non-empty), resets its countdown and pulls in newly published batches.
    void publish_and_sync(ThreadId t);

    QueueStats stats() const { return counters_.total(); }
    unsigned k() const { return options_.k; }
    EpochReclaimer& reclaimer() { return reclaimer_; }

    std::uint64_t published_items() const { return published_items_.load(); }
    std::size_t local_list_size(ThreadId t) const;
    unsigned remaining_k(ThreadId t) const { return local_[t.value].remaining_k; }
    std::size_t heap_size(ThreadId t) const { return local_[t.value].heap.size(); }

private:
    struct Item {
        Entry entry;
        std::uint64_t seq;
        unsigned owner;
        std::atomic<bool> taken{false};
        std::atomic<std::uint32_t> refs{2};
        std::atomic<std::uint32_t> canary{audit::kLive};
    };

    struct ItemLess {
        bool operator()(const Item* a, const Item* b) const {
            if (a->entry.key != b->entry.key) return a->entry.key < b->entry.key;
            return a->seq < b->seq;
        }
    };

    struct Batch {
        std::unique_ptr<Item*[]> items;
        std::size_t count = 0;
        std::atomic<Batch*> next{nullptr};
    };

    struct alignas(64) PerThread {
        std::unique_ptr<std::atomic<Item*>[]> local;  // readable by spies
        std::atomic<std::size_t> local_count{0};
        SeqHeap<Item*, ItemLess> heap;
        unsigned remaining_k = 0;
        std::atomic<Batch*> cursor{nullptr};
        std::mt19937_64 rng;
        std::uint64_t next_seq = 0;
    };

    static void destroy_item(void* p);
    static void poison_item(void* p);
    static void destroy_batch(void* p);
    static bool try_acquire(Item* item);
    static void release(const EpochReclaimer::Guard& g, Item* item);

    void publish(const EpochReclaimer::Guard& g, PerThread& me);
    void sync(unsigned t, PerThread& me);
    std::size_t spy(unsigned t, PerThread& me);
    void trim(const EpochReclaimer::Guard& g);

    KRelaxedOptions options_;
    EpochReclaimer reclaimer_;
    CounterSet counters_;
    std::unique_ptr<PerThread[]> local_;
    Batch* oldest_;
    std::atomic<Batch*> tail_;
    std::atomic<bool> trimming_{false};
    std::atomic<std::uint64_t> published_items_{0};
};

}  // namespace cpq
