#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

namespace cpq {

struct QueueStats {
    std::uint64_t cas_failures = 0;
    std::uint64_t restructures = 0;
    std::uint64_t spray_retries = 0;
    std::uint64_t fao_operations = 0;
    std::uint64_t marked_traversed = 0;
    std::uint64_t root_acquisitions = 0;
    std::uint64_t publications = 0;
    std::uint64_t spy_attempts = 0;
    std::uint64_t cleaner_passes = 0;
};

// Counters owned by one thread slot. Only the owning thread writes them, so a
// relaxed load/store pair is enough; readers tolerate stale values.
struct alignas(64) ThreadCounters {
    std::atomic<std::uint64_t> cas_failures{0};
    std::atomic<std::uint64_t> restructures{0};
    std::atomic<std::uint64_t> spray_retries{0};
    std::atomic<std::uint64_t> fao_operations{0};
    std::atomic<std::uint64_t> marked_traversed{0};
    std::atomic<std::uint64_t> root_acquisitions{0};
    std::atomic<std::uint64_t> publications{0};
    std::atomic<std::uint64_t> spy_attempts{0};
    std::atomic<std::uint64_t> cleaner_passes{0};
};

inline void bump(std::atomic<std::uint64_t>& c, std::uint64_t by = 1) {
    c.store(c.load(std::memory_order_relaxed) + by, std::memory_order_relaxed);
}

class CounterSet {
public:
    explicit CounterSet(unsigned threads)
        : threads_(threads), slots_(std::make_unique<ThreadCounters[]>(threads)) {}

    ThreadCounters& operator[](unsigned t) { return slots_[t]; }

    QueueStats total() const {
        QueueStats s;
        for (unsigned t = 0; t < threads_; ++t) {
            const ThreadCounters& c = slots_[t];
            s.cas_failures += c.cas_failures.load(std::memory_order_relaxed);
            s.restructures += c.restructures.load(std::memory_order_relaxed);
            s.spray_retries += c.spray_retries.load(std::memory_order_relaxed);
            s.fao_operations += c.fao_operations.load(std::memory_order_relaxed);
            s.marked_traversed += c.marked_traversed.load(std::memory_order_relaxed);
            s.root_acquisitions += c.root_acquisitions.load(std::memory_order_relaxed);
            s.publications += c.publications.load(std::memory_order_relaxed);
            s.spy_attempts += c.spy_attempts.load(std::memory_order_relaxed);
            s.cleaner_passes += c.cleaner_passes.load(std::memory_order_relaxed);
        }
        return s;
    }

private:
    unsigned threads_;
    std::unique_ptr<ThreadCounters[]> slots_;
};

}  // namespace cpq
