#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace cpq {

using Key = std::uint32_t;
using Payload = std::uint64_t;

struct Entry {
    Key key{};
    Payload payload{};

    friend bool operator==(const Entry&, const Entry&) = default;
};

using PopResult = std::optional<Entry>;

// Slot index of the calling thread; every concurrent queue is built for a fixed
// number of slots and each live thread must use a distinct one.
struct ThreadId {
    unsigned value{};

    constexpr ThreadId() = default;
    constexpr explicit ThreadId(unsigned v) : value(v) {}

    friend constexpr bool operator==(ThreadId, ThreadId) = default;
};

// Total order used by every strict queue: key first, then insertion sequence.
struct SequencedEntry {
    Entry entry;
    std::uint64_t seq{};

    friend constexpr bool operator<(const SequencedEntry& a, const SequencedEntry& b) {
        if (a.entry.key != b.entry.key) return a.entry.key < b.entry.key;
        return a.seq < b.seq;
    }
};

class CapacityExceeded : public std::runtime_error {
public:
    CapacityExceeded() : std::runtime_error("priority queue capacity exceeded") {}
};

class BadThreadId : public std::out_of_range {
public:
    BadThreadId() : std::out_of_range("thread id outside the queue's thread slots") {}
};

inline void check_thread(ThreadId t, unsigned max_threads) {
    if (t.value >= max_threads) throw BadThreadId();
}

}  // namespace cpq
