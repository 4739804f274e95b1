#include "cpq/linden/linden_queue.hpp"

#include <limits>

#include "cpq/core/yield.hpp"

namespace cpq {

LindenQueue::LindenQueue(LindenOptions options)
    : options_(options),
      reclaimer_(options.max_threads, ReclaimerOptions{.quarantine = options.quarantine}),
      counters_(options.max_threads),
      local_(std::make_unique<PerThread[]>(options.max_threads)) {
    if (options_.max_threads == 0 || options_.max_threads > kMaxSeqThreads) throw BadThreadId();
    for (unsigned t = 0; t < options_.max_threads; ++t) local_[t].rng.seed(options_.seed * 0x9e3779b97f4a7c15ULL + t);
    head_ = SkipNode::create(OrderKey{NodeClass::Dummy, 0, 0}, 0, kMaxLevel);
    tail_ = SkipNode::create(OrderKey{NodeClass::Tail, std::numeric_limits<Key>::max(),
                                      std::numeric_limits<std::uint64_t>::max()},
                             0, kMaxLevel);
    for (int i = 0; i < kLevels; ++i) head_->next(i).store(MarkedPtr(tail_, false));
}

LindenQueue::~LindenQueue() {
    SkipNode* n = head_->next(0).load().ptr();
    while (n != tail_) {
        SkipNode* next = n->next(0).load().ptr();
        SkipNode::destroy(n);
        n = next;
    }
    SkipNode::destroy(head_);
    SkipNode::destroy(tail_);
}

// Per level, finds the last node before `target` whose successor is not
// deleted. Returns the last deleted bottom-level node passed, if any.
SkipNode* LindenQueue::locate_preds(const OrderKey& target, SkipNode** preds,
                                    SkipNode** succs) const {
    SkipNode* del = nullptr;
    SkipNode* x = head_;
    for (int i = kMaxLevel; i >= 0; --i) {
        MarkedPtr link = x->next(i).load();
        bool d = link.marked();
        SkipNode* x_next = link.ptr();
        x_next->audit();
        while ((x_next != tail_ && x_next->order < target) || x_next->next(0).load().marked() ||
               (i == 0 && d)) {
            if (i == 0 && d) del = x_next;
            x = x_next;
            link = x->next(i).load();
            d = link.marked();
            x_next = link.ptr();
            x_next->audit();
        }
        preds[i] = x;
        succs[i] = x_next;
    }
    return del;
}

void LindenQueue::insert(ThreadId t, Entry e) {
    check_thread(t, options_.max_threads);
    PerThread& me = local_[t.value];
    SkipNode* node = SkipNode::create(OrderKey{NodeClass::Real, e.key, make_seq(me.next_seq++, t)},
                                      e.payload, random_level(me.rng));
    node->inserting.store(true, std::memory_order_relaxed);
    SkipNode* preds[kLevels];
    SkipNode* succs[kLevels];

    auto guard = reclaimer_.pin(t);
    SkipNode* del;
    for (;;) {
        del = locate_preds(node->order, preds, succs);
        node->next(0).store(MarkedPtr(succs[0], false), std::memory_order_relaxed);
        if (preds[0]->next(0).compare_exchange(MarkedPtr(succs[0], false), MarkedPtr(node, false))) break;
        bump(counters_[t.value].cas_failures);
    }
    yield_point("linden.insert.linked");

    int i = 1;
    while (i <= node->top_level) {
        node->next(i).store(MarkedPtr(succs[i], false));
        if (node->next(0).load().marked() || succs[i]->next(0).load().marked() || del == succs[i]) {
            break;
        }
        if (preds[i]->next(i).compare_exchange(MarkedPtr(succs[i], false), MarkedPtr(node, false))) {
            ++i;
        } else {
            bump(counters_[t.value].cas_failures);
            del = locate_preds(node->order, preds, succs);
            if (succs[0] != node) break;
        }
    }
    node->inserting.store(false, std::memory_order_release);
}

PopResult LindenQueue::delete_min(ThreadId t) {
    check_thread(t, options_.max_threads);
    ThreadCounters& ctr = counters_[t.value];
    auto guard = reclaimer_.pin(t);

    SkipNode* x = head_;
    const MarkedPtr obs_head = x->next(0).load();
    SkipNode* newhead = nullptr;
    unsigned offset = 0;
    MarkedPtr nxt;
    do {
        ++offset;
        x->audit();
        nxt = x->next(0).load();
        if (nxt.ptr() == tail_) return std::nullopt;
        if (newhead == nullptr && x->inserting.load(std::memory_order_acquire)) newhead = x;
        if (nxt.marked()) continue;
        nxt = x->next(0).fetch_mark();
        bump(ctr.fao_operations);
    } while ((x = nxt.ptr()) && nxt.marked());

    bump(ctr.marked_traversed, offset - 1);
    yield_point("linden.pop.claimed");
    const Entry out = x->entry();
    if (newhead == nullptr) newhead = x;

    if (offset <= options_.bound_offset) return out;
    if (head_->next(0).load() != obs_head) return out;
    if (newhead == obs_head.ptr()) return out;
    if (head_->next(0).compare_exchange(obs_head, MarkedPtr(newhead, true))) {
        bump(ctr.restructures);
        restructure(t);
        SkipNode* cur = obs_head.ptr();
        while (cur != newhead) {
            SkipNode* next = cur->next(0).load().ptr();
            guard.retire(cur, &SkipNode::destroy, &SkipNode::poison);
            cur = next;
        }
    } else {
        bump(ctr.cas_failures);
    }
    return out;
}

// Swings the head's upper-level pointers past nodes whose successor is deleted.
void LindenQueue::restructure(ThreadId t) {
    SkipNode* pred = head_;
    int i = kMaxLevel;
    while (i > 0) {
        MarkedPtr h = head_->next(i).load();
        SkipNode* cur = pred->next(i).load().ptr();
        if (!h.ptr()->next(0).load().marked()) {
            --i;
            continue;
        }
        while (cur->next(0).load().marked()) {
            pred = cur;
            cur = pred->next(i).load().ptr();
        }
        if (head_->next(i).compare_exchange(h, MarkedPtr(pred->next(i).load().ptr(), false))) {
            --i;
        } else {
            bump(counters_[t.value].cas_failures);
        }
    }
}

bool LindenQueue::prefix_invariant_holds() const {
    bool in_prefix = true;
    for (const SkipNode* n = head_; n != tail_; n = n->next(0).load().ptr()) {
        bool marked = n->next(0).load().marked();
        if (marked && !in_prefix) return false;
        if (!marked) in_prefix = false;
    }
    return true;
}

std::size_t LindenQueue::deleted_prefix_length() const {
    std::size_t count = 0;
    for (const SkipNode* n = head_; n != tail_; n = n->next(0).load().ptr()) {
        if (!n->next(0).load().marked()) break;
        ++count;
    }
    return count;
}

std::vector<Entry> LindenQueue::live_entries() const {
    std::vector<Entry> out;
    const SkipNode* n = head_;
    while (n != tail_ && n->next(0).load().marked()) n = n->next(0).load().ptr();
    for (n = n->next(0).load().ptr(); n != tail_; n = n->next(0).load().ptr()) {
        out.push_back(n->entry());
    }
    return out;
}

}  // namespace cpq
