#include "cpq/verify/recorder.hpp"

#include <algorithm>

namespace cpq::verify {

Recorder::Recorder(unsigned max_threads)
    : max_threads_(max_threads), buffers_(std::make_unique<Buffer[]>(max_threads)) {}

void Recorder::invoke(unsigned thread, OpKind op, std::optional<Key> value) {
    check_thread(ThreadId(thread), max_threads_);
    const std::uint64_t now = clock_.fetch_add(1, std::memory_order_seq_cst);
    buffers_[thread].events.push_back(Event{now, thread, EventKind::Invoke, op, value});
}

void Recorder::respond(unsigned thread, OpKind op, std::optional<Key> value) {
    check_thread(ThreadId(thread), max_threads_);
    const std::uint64_t now = clock_.fetch_add(1, std::memory_order_seq_cst);
    buffers_[thread].events.push_back(Event{now, thread, EventKind::Respond, op, value});
}

History Recorder::history() const {
    History all;
    for (unsigned t = 0; t < max_threads_; ++t) {
        all.insert(all.end(), buffers_[t].events.begin(), buffers_[t].events.end());
    }
    std::sort(all.begin(), all.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    return all;
}

void Recorder::clear() {
    for (unsigned t = 0; t < max_threads_; ++t) buffers_[t].events.clear();
    clock_.store(0);
}

}  // namespace cpq::verify
