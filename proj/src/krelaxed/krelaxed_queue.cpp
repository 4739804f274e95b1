#include "cpq/krelaxed/krelaxed_queue.hpp"

#include <unordered_set>

#include "cpq/core/yield.hpp"

namespace cpq {

KRelaxedQueue::KRelaxedQueue(KRelaxedOptions options)
    : options_(options),
      reclaimer_(options.max_threads, ReclaimerOptions{.quarantine = options.quarantine}),
      counters_(options.max_threads),
      local_(std::make_unique<PerThread[]>(options.max_threads)) {
    if (options_.max_threads == 0) throw BadThreadId();
    if (options_.k == 0) throw std::invalid_argument("k must be positive");
    oldest_ = new Batch();
    tail_.store(oldest_);
    for (unsigned t = 0; t < options_.max_threads; ++t) {
        PerThread& p = local_[t];
        p.local = std::make_unique<std::atomic<Item*>[]>(options_.k);
        p.remaining_k = options_.k;
        p.cursor.store(oldest_);
        p.rng.seed(options_.seed * 0x9e3779b97f4a7c15ULL + t);
    }
}

KRelaxedQueue::~KRelaxedQueue() {
    std::unordered_set<Item*> live;
    for (unsigned t = 0; t < options_.max_threads; ++t) {
        PerThread& p = local_[t];
        for (Item* item : p.heap.storage()) live.insert(item);
        for (std::size_t i = 0; i < p.local_count.load(); ++i) live.insert(p.local[i].load());
    }
    for (Batch* b = oldest_; b != nullptr;) {
        for (std::size_t i = 0; i < b->count; ++i) live.insert(b->items[i]);
        Batch* next = b->next.load();
        delete b;
        b = next;
    }
    for (Item* item : live) delete item;
}

void KRelaxedQueue::destroy_item(void* p) { delete static_cast<Item*>(p); }

void KRelaxedQueue::poison_item(void* p) {
    static_cast<Item*>(p)->canary.store(audit::kPoisoned, std::memory_order_relaxed);
}

void KRelaxedQueue::destroy_batch(void* p) { delete static_cast<Batch*>(p); }

bool KRelaxedQueue::try_acquire(Item* item) {
    std::uint32_t r = item->refs.load(std::memory_order_acquire);
    while (r != 0) {
        if (item->refs.compare_exchange_weak(r, r + 1, std::memory_order_acq_rel)) return true;
    }
    return false;
}

void KRelaxedQueue::release(const EpochReclaimer::Guard& g, Item* item) {
    if (item->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) {
        g.retire(item, &destroy_item, &poison_item);
    }
}

std::size_t KRelaxedQueue::local_list_size(ThreadId t) const {
    return local_[t.value].local_count.load();
}

void KRelaxedQueue::insert(ThreadId t, Entry e) {
    check_thread(t, options_.max_threads);
    PerThread& me = local_[t.value];
    auto* item = new Item{e, me.next_seq++ * options_.max_threads + t.value, t.value};
    auto guard = reclaimer_.pin(t);
    const std::size_t n = me.local_count.load(std::memory_order_relaxed);
    me.local[n].store(item, std::memory_order_release);
    me.local_count.store(n + 1, std::memory_order_release);
    me.heap.push(item);
    if (--me.remaining_k == 0) {
        publish(guard, me);
        sync(t.value, me);
        trim(guard);
    }
}

void KRelaxedQueue::publish_and_sync(ThreadId t) {
    check_thread(t, options_.max_threads);
    PerThread& me = local_[t.value];
    auto guard = reclaimer_.pin(t);
    publish(guard, me);
    sync(t.value, me);
    trim(guard);
}

void KRelaxedQueue::publish(const EpochReclaimer::Guard& g, PerThread& me) {
    me.remaining_k = options_.k;
    const std::size_t n = me.local_count.load(std::memory_order_relaxed);
    if (n == 0) return;
    auto* batch = new Batch();
    batch->items = std::make_unique<Item*[]>(n);
    batch->count = n;
    for (std::size_t i = 0; i < n; ++i) batch->items[i] = me.local[i].load(std::memory_order_relaxed);

    ThreadCounters& ctr = counters_[g.thread().value];
    for (;;) {
        Batch* last = tail_.load(std::memory_order_acquire);
        Batch* next = last->next.load(std::memory_order_acquire);
        if (next != nullptr) {
            tail_.compare_exchange_weak(last, next, std::memory_order_acq_rel);
            continue;
        }
        yield_point("krelaxed.publish.append");
        if (last->next.compare_exchange_strong(next, batch, std::memory_order_acq_rel)) {
            tail_.compare_exchange_strong(last, batch, std::memory_order_acq_rel);
            break;
        }
        bump(ctr.cas_failures);
    }
    me.local_count.store(0, std::memory_order_release);
    published_items_.fetch_add(n, std::memory_order_relaxed);
    bump(ctr.publications);
}

void KRelaxedQueue::sync(unsigned t, PerThread& me) {
    Batch* c = me.cursor.load(std::memory_order_relaxed);
    while (Batch* n = c->next.load(std::memory_order_acquire)) {
        for (std::size_t i = 0; i < n->count; ++i) {
            Item* item = n->items[i];
            if (item->owner == t) continue;  // already in our heap
            if (item->taken.load(std::memory_order_relaxed)) continue;
            if (try_acquire(item)) me.heap.push(item);
        }
        c = n;
        me.cursor.store(c, std::memory_order_release);
    }
}

// Frees batches every thread has already synchronized past.
void KRelaxedQueue::trim(const EpochReclaimer::Guard& g) {
    if (trimming_.exchange(true, std::memory_order_acquire)) return;
    for (;;) {
        Batch* b = oldest_;
        Batch* next = b->next.load(std::memory_order_acquire);
        if (next == nullptr || tail_.load(std::memory_order_acquire) == b) break;
        bool in_use = false;
        for (unsigned t = 0; t < options_.max_threads && !in_use; ++t) {
            in_use = local_[t].cursor.load(std::memory_order_acquire) == b;
        }
        if (in_use) break;
        oldest_ = next;
        for (std::size_t i = 0; i < b->count; ++i) release(g, b->items[i]);
        g.retire(b, &destroy_batch);
    }
    trimming_.store(false, std::memory_order_release);
}

std::size_t KRelaxedQueue::spy(unsigned t, PerThread& me) {
    const unsigned p = options_.max_threads;
    if (p < 2) return 0;
    bump(counters_[t].spy_attempts);
    const unsigned first = std::uniform_int_distribution<unsigned>(0, p - 2)(me.rng);
    for (unsigned step = 0; step + 1 < p; ++step) {
        unsigned victim = (first + step) % (p - 1);
        if (victim >= t) ++victim;
        PerThread& v = local_[victim];
        std::size_t copied = 0;
        const std::size_t n = v.local_count.load(std::memory_order_acquire);
        for (std::size_t i = 0; i < n && i < options_.k; ++i) {
            Item* item = v.local[i].load(std::memory_order_acquire);
            if (item == nullptr) continue;
            audit::check(item->canary);
            if (item->taken.load(std::memory_order_relaxed) || !try_acquire(item)) continue;
            me.heap.push(item);
            ++copied;
        }
        if (copied > 0) return copied;
    }
    return 0;
}

PopResult KRelaxedQueue::delete_min(ThreadId t) {
    check_thread(t, options_.max_threads);
    PerThread& me = local_[t.value];
    ThreadCounters& ctr = counters_[t.value];
    auto guard = reclaimer_.pin(t);
    sync(t.value, me);
    bool spied = false;
    for (;;) {
        while (auto top = me.heap.pop()) {
            Item* item = *top;
            audit::check(item->canary);
            if (!item->taken.load(std::memory_order_relaxed)) {
                bool expected = false;
                if (item->taken.compare_exchange_strong(expected, true, std::memory_order_acq_rel)) {
                    const Entry out = item->entry;
                    release(guard, item);
                    return out;
                }
                bump(ctr.cas_failures);
            }
            release(guard, item);
        }
        if (spied || spy(t.value, me) == 0) return std::nullopt;
        spied = true;
    }
}

}  // namespace cpq
