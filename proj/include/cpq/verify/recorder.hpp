#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cpq/core/any_queue.hpp"
#include "cpq/verify/history.hpp"

namespace cpq::verify {

// Timestamps events from one shared counter. An invocation is stamped before
// the operation starts and a response after it returns, so every recorded
// interval contains the real one.
class Recorder {
public:
    explicit Recorder(unsigned max_threads);

    void invoke(unsigned thread, OpKind op, std::optional<Key> value);
    void respond(unsigned thread, OpKind op, std::optional<Key> value);

    // All events so far, ordered by time.
    History history() const;
    void clear();

private:
    struct alignas(64) Buffer {
        std::vector<Event> events;
    };

    unsigned max_threads_;
    std::atomic<std::uint64_t> clock_{0};
    std::unique_ptr<Buffer[]> buffers_;
};

// Forwards to another queue and records every call.
class RecordingQueue final : public AnyQueue {
public:
    RecordingQueue(AnyQueue& inner, Recorder& recorder) : inner_(inner), recorder_(recorder) {}

    void insert(ThreadId t, Entry e) override {
        recorder_.invoke(t.value, OpKind::Insert, e.key);
        inner_.insert(t, e);
        recorder_.respond(t.value, OpKind::Insert, e.key);
    }

    PopResult delete_min(ThreadId t) override {
        recorder_.invoke(t.value, OpKind::DeleteMin, std::nullopt);
        PopResult r = inner_.delete_min(t);
        recorder_.respond(t.value, OpKind::DeleteMin,
                          r ? std::optional<Key>(r->key) : std::nullopt);
        return r;
    }

    QueueStats stats() const override { return inner_.stats(); }
    std::string_view name() const override { return inner_.name(); }

private:
    AnyQueue& inner_;
    Recorder& recorder_;
};

}  // namespace cpq::verify
