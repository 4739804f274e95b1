#pragma once

#include <concepts>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "cpq/core/entry.hpp"
#include "cpq/core/stats.hpp"

namespace cpq {

template <class Q>
concept ConcurrentPriorityQueue = requires(Q& q, ThreadId t, Entry e) {
    q.insert(t, e);
    { q.delete_min(t) } -> std::same_as<PopResult>;
    { q.stats() } -> std::same_as<QueueStats>;
};

// Type-erased queue used by the benchmark driver and the verification tools.
class AnyQueue {
public:
    virtual ~AnyQueue() = default;
    virtual void insert(ThreadId t, Entry e) = 0;
    virtual PopResult delete_min(ThreadId t) = 0;
    virtual QueueStats stats() const = 0;
    virtual std::string_view name() const = 0;
};

template <ConcurrentPriorityQueue Q>
class QueueAdapter final : public AnyQueue {
public:
    template <class... Args>
    explicit QueueAdapter(std::string name, Args&&... args)
        : name_(std::move(name)), queue_(std::forward<Args>(args)...) {}

    void insert(ThreadId t, Entry e) override { queue_.insert(t, e); }
    PopResult delete_min(ThreadId t) override { return queue_.delete_min(t); }
    QueueStats stats() const override { return queue_.stats(); }
    std::string_view name() const override { return name_; }

    Q& inner() { return queue_; }

private:
    std::string name_;
    Q queue_;
};

}  // namespace cpq
