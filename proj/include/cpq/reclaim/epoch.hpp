#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "cpq/core/entry.hpp"

namespace cpq {

using Deleter = void (*)(void*);

struct ReclaimerOptions {
    // A retire call attempts an epoch advance every this many retires.
    unsigned advance_every = 128;
    // Keep reclaimed nodes allocated (poisoned) until the reclaimer dies, so
    // that a use after reclamation is observable instead of undefined.
    bool quarantine = false;
};

// Epoch-based reclamation with a two-epoch grace period. A node retired while
// the global epoch is e is freed once the global epoch reaches e + 2; the
// global epoch only advances when every pinned thread has observed it.
class EpochReclaimer {
public:
    explicit EpochReclaimer(unsigned max_threads, ReclaimerOptions options = {});
    ~EpochReclaimer();

    EpochReclaimer(const EpochReclaimer&) = delete;
    EpochReclaimer& operator=(const EpochReclaimer&) = delete;

    class Guard {
    public:
        Guard(Guard&& other) noexcept : owner_(other.owner_), thread_(other.thread_) {
            other.owner_ = nullptr;
        }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;
        Guard& operator=(Guard&&) = delete;
        ~Guard() {
            if (owner_) owner_->unpin(thread_);
        }

        // Hands an unreachable node to the reclaimer. `poison` runs instead of
        // `deleter` when the reclaimer is in quarantine mode.
        void retire(void* node, Deleter deleter, Deleter poison = nullptr) const {
            owner_->retire(thread_, node, deleter, poison);
        }

        template <class T>
        void retire(T* node) const {
            retire(node, [](void* p) { delete static_cast<T*>(p); });
        }

        ThreadId thread() const { return ThreadId(thread_); }

    private:
        friend class EpochReclaimer;
        Guard(EpochReclaimer* owner, unsigned thread) : owner_(owner), thread_(thread) {}

        EpochReclaimer* owner_;
        unsigned thread_;
    };

    // Pins may nest; only the outermost pin announces an epoch.
    [[nodiscard]] Guard pin(ThreadId t);

    bool try_advance();

    std::uint64_t epoch() const { return global_.load(std::memory_order_acquire); }
    unsigned max_threads() const { return max_threads_; }
    bool quarantine() const { return options_.quarantine; }

    std::uint64_t retired_count() const { return retired_.load(std::memory_order_relaxed); }
    std::uint64_t reclaimed_count() const { return reclaimed_.load(std::memory_order_relaxed); }
    std::uint64_t pending_count() const { return retired_count() - reclaimed_count(); }

    bool is_pinned(ThreadId t) const;
    // Number of outermost pins of `t` that have been released.
    std::uint64_t unpin_count(ThreadId t) const;

private:
    struct Retired {
        void* node;
        Deleter deleter;
        Deleter poison;
        std::uint64_t epoch;
    };

    struct alignas(64) Slot {
        std::atomic<std::uint64_t> state{0};  // (epoch << 1) | active
        std::atomic<std::uint64_t> unpins{0};
        unsigned nesting = 0;
        std::uint64_t retire_calls = 0;
        std::mutex mutex;
        std::vector<Retired> retired;
    };

    void unpin(unsigned t);
    void retire(unsigned t, void* node, Deleter deleter, Deleter poison);
    void reclaim_up_to(std::uint64_t global);
    void dispose(const Retired& r);

    unsigned max_threads_;
    ReclaimerOptions options_;
    std::atomic<std::uint64_t> global_{0};
    std::unique_ptr<Slot[]> slots_;
    std::atomic<std::uint64_t> retired_{0};
    std::atomic<std::uint64_t> reclaimed_{0};
    std::mutex quarantine_mutex_;
    std::vector<Retired> quarantined_;
};

}  // namespace cpq
