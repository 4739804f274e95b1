#include "cpq/spray/spray_queue.hpp"

#include <bit>
#include <cmath>

namespace cpq {

SprayParams SprayParams::for_threads(unsigned p) {
    if (p == 0) p = 1;
    SprayParams s;
    s.start_height = static_cast<int>(std::bit_width(p - 1)) + 1;  // ceil(log2 p) + 1
    const double lg = std::log2(static_cast<double>(p) + 1.0);
    s.max_jump = static_cast<unsigned>(std::ceil(lg * lg * lg - 1e-9));
    s.descent = 1;
    s.dummy_count = static_cast<std::size_t>(p) * s.max_jump;
    s.cleaner_probability = 1.0 / p;
    s.respray_limit = 16;
    s.cleaner_span = s.dummy_count + 2 * static_cast<std::size_t>(s.max_jump) *
                                         (std::size_t{1} << s.start_height);
    return s;
}

SprayQueue::SprayQueue(SprayOptions options)
    : options_(options),
      params_(options.params ? *options.params
                             : SprayParams::for_threads(options.spray_threads ? options.spray_threads
                                                                              : options.max_threads)),
      reclaimer_(options.max_threads, ReclaimerOptions{.quarantine = options.quarantine}),
      counters_(options.max_threads),
      list_(counters_),
      local_(std::make_unique<PerThread[]>(options.max_threads)) {
    if (options_.max_threads == 0 || options_.max_threads > kMaxSeqThreads) throw BadThreadId();
    for (unsigned t = 0; t < options_.max_threads; ++t) local_[t].rng.seed(options_.seed * 0x9e3779b97f4a7c15ULL + t);

    std::mt19937_64 rng(options_.seed ^ 0xd1b54a32d192ed03ULL);
    auto guard = reclaimer_.pin(ThreadId(0));
    for (std::size_t i = 0; i < params_.dummy_count; ++i) {
        list_.insert(guard, SkipNode::create(OrderKey{NodeClass::Dummy, 0, i}, 0, random_level(rng)));
    }
}

void SprayQueue::insert(ThreadId t, Entry e) {
    check_thread(t, options_.max_threads);
    insert_with_level(t, e, random_level(local_[t.value].rng));
}

void SprayQueue::insert_with_level(ThreadId t, Entry e, int level) {
    check_thread(t, options_.max_threads);
    PerThread& me = local_[t.value];
    SkipNode* node = SkipNode::create(OrderKey{NodeClass::Real, e.key, make_seq(me.next_seq++, t)},
                                      e.payload, level < kMaxLevel ? level : kMaxLevel);
    auto guard = reclaimer_.pin(t);
    list_.insert(guard, node);
}

SkipNode* SprayQueue::spray(ThreadId t) {
    std::mt19937_64& rng = local_[t.value].rng;
    std::uniform_int_distribution<unsigned> jump(0, params_.max_jump);
    return spray_walk([&](int) { return jump(rng); });
}

bool SprayQueue::try_claim(SkipNode* n) {
    if (n->deleted.load(std::memory_order_acquire)) return false;
    bool expected = false;
    return n->deleted.compare_exchange_strong(expected, true, std::memory_order_acq_rel);
}

PopResult SprayQueue::delete_min(ThreadId t) {
    check_thread(t, options_.max_threads);
    ThreadCounters& ctr = counters_[t.value];
    std::mt19937_64& rng = local_[t.value].rng;
    auto guard = reclaimer_.pin(t);

    for (unsigned attempt = 0; attempt < params_.respray_limit; ++attempt) {
        SkipNode* n = spray(t);
        if (n != list_.tail() && !n->is_dummy()) {
            if (try_claim(n)) return n->entry();
            if (std::bernoulli_distribution(params_.cleaner_probability)(rng)) clean(guard);
        }
        bump(ctr.spray_retries);
    }

    for (SkipNode* n = list_.head()->next(0).load().ptr(); n != list_.tail();
         n = n->next(0).load().ptr()) {
        n->audit();
        if (n->is_dummy()) continue;
        if (try_claim(n)) return n->entry();
        if (SkipList::mark_delete(n)) list_.finish_delete(guard, n);
    }
    return std::nullopt;
}

// Physically removes claimed nodes from the region sprays can reach.
void SprayQueue::clean(const EpochReclaimer::Guard& g) {
    bump(counters_[g.thread().value].cleaner_passes);
    std::size_t visited = 0;
    for (SkipNode* n = list_.head()->next(0).load().ptr();
         n != list_.tail() && visited < params_.cleaner_span; n = n->next(0).load().ptr(), ++visited) {
        n->audit();
        if (n->deleted.load(std::memory_order_acquire) && SkipList::mark_delete(n)) {
            list_.finish_delete(g, n);
        }
    }
}

}  // namespace cpq
