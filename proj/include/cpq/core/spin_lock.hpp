#pragma once

#include <atomic>
#include <thread>

namespace cpq {

// Test-and-test-and-set lock that yields the CPU after a short spin, so that
// oversubscribed runs do not burn whole time slices on a held lock.
class SpinLock {
public:
    void lock() noexcept {
        for (;;) {
            if (!flag_.exchange(true, std::memory_order_acquire)) return;
            for (int spins = 0; flag_.load(std::memory_order_relaxed); ++spins) {
                if (spins >= kSpinsBeforeYield) std::this_thread::yield();
            }
        }
    }

    bool try_lock() noexcept {
        return !flag_.load(std::memory_order_relaxed) &&
               !flag_.exchange(true, std::memory_order_acquire);
    }

    void unlock() noexcept { flag_.store(false, std::memory_order_release); }

private:
    static constexpr int kSpinsBeforeYield = 32;
    std::atomic<bool> flag_{false};
};

}  // namespace cpq
