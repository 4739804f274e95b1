#pragma once

#include <atomic>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>

#include "cpq/core/entry.hpp"
#include "cpq/reclaim/audit.hpp"

namespace cpq {

inline constexpr int kMaxLevel = 32;
inline constexpr int kLevels = kMaxLevel + 1;

// Geometric level: P(level >= i) = 2^-i, capped at kMaxLevel. Each low one bit
// of a 64-bit draw is a coin that came up heads.
template <class Urbg>
int random_level(Urbg& rng) {
    int heads = std::countr_one(static_cast<std::uint64_t>(rng()));
    return heads < kMaxLevel ? heads : kMaxLevel;
}

enum class NodeClass : std::uint8_t { Dummy = 0, Real = 1, Tail = 2 };

// Position of a node in the list. Dummies sort before every real key and the
// tail after everything; the head is never compared.
struct OrderKey {
    NodeClass cls = NodeClass::Real;
    Key key = 0;
    std::uint64_t seq = 0;

    friend constexpr auto operator<=>(const OrderKey&, const OrderKey&) = default;
};

class SkipNode;

class MarkedPtr {
public:
    constexpr MarkedPtr() = default;
    MarkedPtr(SkipNode* p, bool mark)
        : bits_(reinterpret_cast<std::uintptr_t>(p) | static_cast<std::uintptr_t>(mark)) {}

    static constexpr MarkedPtr from_bits(std::uintptr_t bits) {
        MarkedPtr m;
        m.bits_ = bits;
        return m;
    }

    SkipNode* ptr() const { return reinterpret_cast<SkipNode*>(bits_ & ~std::uintptr_t{1}); }
    bool marked() const { return (bits_ & 1u) != 0; }
    std::uintptr_t bits() const { return bits_; }

    friend constexpr bool operator==(MarkedPtr, MarkedPtr) = default;

private:
    std::uintptr_t bits_ = 0;
};

class MarkedLink {
public:
    MarkedPtr load(std::memory_order mo = std::memory_order_acquire) const {
        return MarkedPtr::from_bits(word_.load(mo));
    }

    void store(MarkedPtr v, std::memory_order mo = std::memory_order_release) {
        word_.store(v.bits(), mo);
    }

    bool compare_exchange(MarkedPtr expected, MarkedPtr desired) {
        std::uintptr_t e = expected.bits();
        return word_.compare_exchange_strong(e, desired.bits(), std::memory_order_acq_rel,
                                             std::memory_order_acquire);
    }

    // Sets the mark bit and returns the previous value.
    MarkedPtr fetch_mark() {
        return MarkedPtr::from_bits(word_.fetch_or(1, std::memory_order_acq_rel));
    }

private:
    std::atomic<std::uintptr_t> word_{0};
};

// Skip-list tower. The successor words live in the same allocation, directly
// after the node header.
class SkipNode {
public:
    static SkipNode* create(OrderKey order, Payload payload, int top_level);
    static void destroy(void* node);
    static void poison(void* node);

    SkipNode(const SkipNode&) = delete;
    SkipNode& operator=(const SkipNode&) = delete;

    MarkedLink& next(int level) { return links()[level]; }
    const MarkedLink& next(int level) const { return links()[level]; }

    Entry entry() const { return Entry{order.key, payload}; }
    bool is_dummy() const { return order.cls == NodeClass::Dummy; }
    void audit() const { audit::check(canary); }

    const OrderKey order;
    const Payload payload;
    const int top_level;
    std::atomic<std::uint32_t> canary{audit::kLive};
    std::atomic<bool> deleted{false};
    std::atomic<bool> inserting{false};
    std::atomic<std::uint8_t> owners{2};
    std::atomic<std::uint64_t> timestamp{0};

private:
    SkipNode(OrderKey o, Payload p, int level) : order(o), payload(p), top_level(level) {}

    MarkedLink* links() {
        return reinterpret_cast<MarkedLink*>(reinterpret_cast<std::byte*>(this) + kHeaderSize);
    }
    const MarkedLink* links() const {
        return reinterpret_cast<const MarkedLink*>(reinterpret_cast<const std::byte*>(this) +
                                                   kHeaderSize);
    }

    static const std::size_t kHeaderSize;
};

// Builds per-thread sequence numbers: a local counter in the high bits and
// the thread slot in the low bits, so numbers are unique without sharing.
inline std::uint64_t make_seq(std::uint64_t local, ThreadId t) {
    return (local << 16) | t.value;
}
inline constexpr unsigned kMaxSeqThreads = 1u << 16;

}  // namespace cpq
