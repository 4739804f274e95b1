#pragma once

#include <atomic>
#include <cstdint>

namespace cpq::audit {

// Nodes carry a canary that is overwritten when the reclaimer poisons them in
// quarantine mode. Traversals validate it, so any use after reclamation shows
// up as a counted violation.
inline constexpr std::uint32_t kLive = 0x5afe11feu;
inline constexpr std::uint32_t kPoisoned = 0xdeadbeefu;

namespace detail {
inline std::atomic<std::uint64_t> g_violations{0};
}

inline void check(const std::atomic<std::uint32_t>& canary) {
    if (canary.load(std::memory_order_relaxed) != kLive) [[unlikely]] {
        detail::g_violations.fetch_add(1, std::memory_order_relaxed);
    }
}

inline std::uint64_t violations() { return detail::g_violations.load(); }
inline void reset_violations() { detail::g_violations.store(0); }

}  // namespace cpq::audit
