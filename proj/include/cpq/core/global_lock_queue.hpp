#pragma once

#include <cstdint>
#include <mutex>

#include "cpq/core/entry.hpp"
#include "cpq/core/seq_heap.hpp"
#include "cpq/core/stats.hpp"

namespace cpq {

// SeqHeap behind one mutex. Baseline for the benchmark and reference for the
// concurrent conservation tests.
class GlobalLockQueue {
public:
    explicit GlobalLockQueue(unsigned max_threads = 1) : max_threads_(max_threads) {}

    void insert(ThreadId t, Entry e) {
        check_thread(t, max_threads_);
        std::lock_guard lock(mutex_);
        heap_.push(SequencedEntry{e, next_seq_++});
    }

    PopResult delete_min(ThreadId t) {
        check_thread(t, max_threads_);
        std::lock_guard lock(mutex_);
        auto top = heap_.pop();
        if (!top) return std::nullopt;
        return top->entry;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return heap_.size();
    }

    QueueStats stats() const { return {}; }

private:
    unsigned max_threads_;
    mutable std::mutex mutex_;
    SeqHeap<SequencedEntry> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace cpq
