#pragma once

#include <atomic>
#include <string_view>

namespace cpq {

// Named points inside queue operations where a test scheduler may pause the
// calling thread. With no hook installed a yield point is a single relaxed load.
class YieldHook {
public:
    virtual ~YieldHook() = default;
    virtual void on_yield(std::string_view label) = 0;
};

namespace detail {
inline std::atomic<YieldHook*> g_yield_hook{nullptr};
}

inline void install_yield_hook(YieldHook* hook) {
    detail::g_yield_hook.store(hook, std::memory_order_seq_cst);
}

inline void yield_point(std::string_view label) {
    if (YieldHook* h = detail::g_yield_hook.load(std::memory_order_relaxed)) [[unlikely]] {
        h->on_yield(label);
    }
}

}  // namespace cpq
