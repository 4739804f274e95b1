#include "cpq/reclaim/epoch.hpp"

namespace cpq {

namespace {
constexpr std::uint64_t kActive = 1;
}

EpochReclaimer::EpochReclaimer(unsigned max_threads, ReclaimerOptions options)
    : max_threads_(max_threads),
      options_(options),
      slots_(std::make_unique<Slot[]>(max_threads)) {
    if (options_.advance_every == 0) options_.advance_every = 1;
}

EpochReclaimer::~EpochReclaimer() {
    for (unsigned t = 0; t < max_threads_; ++t) {
        for (const Retired& r : slots_[t].retired) r.deleter(r.node);
    }
    for (const Retired& r : quarantined_) r.deleter(r.node);
}

EpochReclaimer::Guard EpochReclaimer::pin(ThreadId t) {
    check_thread(t, max_threads_);
    Slot& s = slots_[t.value];
    if (s.nesting++ == 0) {
        s.state.store((global_.load(std::memory_order_seq_cst) << 1) | kActive,
                      std::memory_order_seq_cst);
        std::atomic_thread_fence(std::memory_order_seq_cst);
    }
    return Guard(this, t.value);
}

void EpochReclaimer::unpin(unsigned t) {
    Slot& s = slots_[t];
    if (--s.nesting == 0) {
        s.state.store(0, std::memory_order_release);
        s.unpins.fetch_add(1, std::memory_order_release);
    }
}

bool EpochReclaimer::is_pinned(ThreadId t) const {
    return (slots_[t.value].state.load(std::memory_order_acquire) & kActive) != 0;
}

std::uint64_t EpochReclaimer::unpin_count(ThreadId t) const {
    return slots_[t.value].unpins.load(std::memory_order_acquire);
}

bool EpochReclaimer::try_advance() {
    std::uint64_t e = global_.load(std::memory_order_seq_cst);
    for (unsigned t = 0; t < max_threads_; ++t) {
        std::uint64_t st = slots_[t].state.load(std::memory_order_seq_cst);
        if ((st & kActive) && (st >> 1) != e) return false;
    }
    if (!global_.compare_exchange_strong(e, e + 1, std::memory_order_seq_cst)) return false;
    reclaim_up_to(e + 1);
    return true;
}

void EpochReclaimer::retire(unsigned t, void* node, Deleter deleter, Deleter poison) {
    Slot& s = slots_[t];
    {
        std::lock_guard lock(s.mutex);
        s.retired.push_back(Retired{node, deleter, poison, global_.load(std::memory_order_seq_cst)});
    }
    retired_.fetch_add(1, std::memory_order_relaxed);
    if (++s.retire_calls % options_.advance_every == 0) try_advance();
}

void EpochReclaimer::reclaim_up_to(std::uint64_t global) {
    std::vector<Retired> ready;
    for (unsigned t = 0; t < max_threads_; ++t) {
        Slot& s = slots_[t];
        std::lock_guard lock(s.mutex);
        auto keep = s.retired.begin();
        for (auto it = s.retired.begin(); it != s.retired.end(); ++it) {
            if (it->epoch + 2 <= global) {
                ready.push_back(*it);
            } else {
                *keep++ = *it;
            }
        }
        s.retired.erase(keep, s.retired.end());
    }
    for (const Retired& r : ready) dispose(r);
    reclaimed_.fetch_add(ready.size(), std::memory_order_relaxed);
}

void EpochReclaimer::dispose(const Retired& r) {
    if (!options_.quarantine) {
        r.deleter(r.node);
        return;
    }
    if (r.poison) r.poison(r.node);
    std::lock_guard lock(quarantine_mutex_);
    quarantined_.push_back(r);
}

}  // namespace cpq
