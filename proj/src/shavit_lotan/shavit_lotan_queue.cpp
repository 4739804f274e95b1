#include "cpq/shavit_lotan/shavit_lotan_queue.hpp"

#include "cpq/core/yield.hpp"

namespace cpq {

ShavitLotanQueue::ShavitLotanQueue(ShavitLotanOptions options)
    : options_(options),
      reclaimer_(options.max_threads, ReclaimerOptions{.quarantine = options.quarantine}),
      counters_(options.max_threads),
      list_(counters_),
      local_(std::make_unique<PerThread[]>(options.max_threads)) {
    if (options_.max_threads == 0 || options_.max_threads > kMaxSeqThreads) throw BadThreadId();
    for (unsigned t = 0; t < options_.max_threads; ++t) local_[t].rng.seed(options_.seed * 0x9e3779b97f4a7c15ULL + t);
}

void ShavitLotanQueue::insert(ThreadId t, Entry e) {
    check_thread(t, options_.max_threads);
    PerThread& me = local_[t.value];
    SkipNode* node = SkipNode::create(OrderKey{NodeClass::Real, e.key, make_seq(me.next_seq++, t)},
                                      e.payload, random_level(me.rng));
    auto guard = reclaimer_.pin(t);
    list_.insert(guard, node, [this](SkipNode* n) {
        n->timestamp.store(clock_.fetch_add(1, std::memory_order_acq_rel) + 1,
                           std::memory_order_release);
    });
}

PopResult ShavitLotanQueue::delete_min(ThreadId t) {
    check_thread(t, options_.max_threads);
    auto guard = reclaimer_.pin(t);
    const std::uint64_t start = clock_.load(std::memory_order_acquire);
    SkipNode* const tail = list_.tail();
    for (SkipNode* curr = list_.head()->next(0).load().ptr(); curr != tail;
         curr = curr->next(0).load().ptr()) {
        curr->audit();
        yield_point("shavitlotan.pop.visit");
        if (options_.timestamps) {
            std::uint64_t ts = curr->timestamp.load(std::memory_order_acquire);
            if (ts == 0 || ts > start) continue;
        }
        if (curr->deleted.load(std::memory_order_acquire)) continue;
        bool expected = false;
        if (!curr->deleted.compare_exchange_strong(expected, true, std::memory_order_acq_rel)) {
            bump(counters_[t.value].cas_failures);
            continue;
        }
        yield_point("shavitlotan.pop.claimed");
        Entry out = curr->entry();
        if (SkipList::mark_delete(curr)) list_.finish_delete(guard, curr);
        return out;
    }
    return std::nullopt;
}

}  // namespace cpq
