#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "cpq/core/entry.hpp"
#include "cpq/core/spin_lock.hpp"
#include "cpq/core/stats.hpp"

namespace cpq {

struct HuntOptions {
    unsigned max_threads = 1;
    std::size_t capacity = std::size_t{1} << 18;
};

// Fixed-capacity array heap with one lock per slot and a lock for the size.
// Insertions fill slots in bit-reversed order within each level and sift up
// while tagged as in transit; deletions swap the last item into the root and
// sift down, moving in-transit items up with their owner tag; an inserter that
// loses sight of its tag climbs after it. Locks are taken parent before child.
class HuntHeap {
public:
    enum class Tag : std::uint32_t { Empty = 0, Available = 1 };
    // Values above Available identify the inserting thread: kOwnerBase + slot.
    static constexpr std::uint32_t kOwnerBase = 2;

    explicit HuntHeap(HuntOptions options = {});

    void insert(ThreadId t, Entry e);
    PopResult delete_min(ThreadId t);

    QueueStats stats() const { return counters_.total(); }
    std::size_t capacity() const { return options_.capacity; }
    std::size_t size() const;

    // Slot receiving the n-th item of the heap (1-based): slots of each level
    // are handed out in bit-reversed order.
    static std::size_t slot_for_count(std::size_t n);
    // Slot the next insertion will use. Requires size() < capacity().
    std::size_t next_insert_slot() const;

    // Quiescent inspection.
    bool heap_order_holds() const;
    std::size_t occupied_slots() const;
    std::vector<Entry> entries() const;

private:
    struct alignas(64) Slot {
        SpinLock lock;
        std::uint32_t tag = static_cast<std::uint32_t>(Tag::Empty);
        SequencedEntry item{};
    };

    static bool before(const Slot& a, const Slot& b) { return a.item < b.item; }
    static void swap_contents(Slot& a, Slot& b);

    HuntOptions options_;
    std::size_t array_size_;
    std::unique_ptr<Slot[]> slots_;
    mutable SpinLock size_lock_;
    std::size_t size_ = 0;
    std::uint64_t next_seq_ = 0;
    CounterSet counters_;
};

}  // namespace cpq
