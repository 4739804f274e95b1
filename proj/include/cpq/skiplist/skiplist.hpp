#pragma once

#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cpq/core/stats.hpp"
#include "cpq/core/yield.hpp"
#include "cpq/reclaim/epoch.hpp"
#include "cpq/skiplist/node.hpp"

namespace cpq {

// Lock-free skip list with marked successor words. A node is deleted
// by marking its own successor words top-down; the bottom mark decides the
// single winner. Searches unlink every marked node they pass.
//
// A node is retired once two parties are done with it: its inserter (after the
// last upper-level link attempt) and the winner of its bottom mark (after a
// cleanup search). Whichever finishes second retires it, so no level can
// still reference the node at retirement.
class SkipList {
public:
    struct Window {
        std::array<SkipNode*, kLevels> preds{};
        std::array<SkipNode*, kLevels> succs{};
    };

    explicit SkipList(CounterSet& counters);
    ~SkipList();

    SkipList(const SkipList&) = delete;
    SkipList& operator=(const SkipList&) = delete;

    SkipNode* head() const { return head_; }
    SkipNode* tail() const { return tail_; }

    // Fills preds/succs with, per level, the last node ordered before `target`
    // and its successor. Caller must hold a guard.
    void search(ThreadId t, const OrderKey& target, Window& w);

    // Links a freshly created node. `on_linked` runs right after the bottom
    // level link succeeds, before upper levels are attempted. Upper levels are
    // abandoned on the first conflict.
    template <class OnLinked>
    void insert(const EpochReclaimer::Guard& g, SkipNode* node, OnLinked&& on_linked);

    void insert(const EpochReclaimer::Guard& g, SkipNode* node) {
        insert(g, node, [](SkipNode*) {});
    }

    // Marks every level of `node` top-down. Returns true for the single caller
    // whose bottom mark succeeded; that caller must call finish_delete.
    static bool mark_delete(SkipNode* node);

    // Physically unlinks a node whose bottom mark the caller won, then drops
    // the caller's ownership.
    void finish_delete(const EpochReclaimer::Guard& g, SkipNode* node);

    // Quiescent inspection.
    std::vector<const SkipNode*> level_nodes(int level) const;
    std::string check_structure() const;

private:
    void release(const EpochReclaimer::Guard& g, SkipNode* node);

    CounterSet& counters_;
    SkipNode* head_;
    SkipNode* tail_;
};

template <class OnLinked>
void SkipList::insert(const EpochReclaimer::Guard& g, SkipNode* node, OnLinked&& on_linked) {
    const ThreadId t = g.thread();
    const OrderKey order = node->order;
    Window w;
    for (;;) {
        search(t, order, w);
        for (int i = 0; i <= node->top_level; ++i) {
            node->next(i).store(MarkedPtr(w.succs[i], false), std::memory_order_relaxed);
        }
        if (w.preds[0]->next(0).compare_exchange(MarkedPtr(w.succs[0], false),
                                                 MarkedPtr(node, false))) {
            break;
        }
        bump(counters_[t.value].cas_failures);
    }
    std::forward<OnLinked>(on_linked)(node);
    yield_point("skiplist.insert.linked");

    for (int i = 1; i <= node->top_level; ++i) {
        SkipNode* succ = w.succs[i];
        MarkedPtr mine = node->next(i).load();
        if (mine.marked()) break;
        if (mine.ptr() != succ &&
            !node->next(i).compare_exchange(mine, MarkedPtr(succ, false))) {
            break;
        }
        if (!w.preds[i]->next(i).compare_exchange(MarkedPtr(succ, false),
                                                  MarkedPtr(node, false))) {
            bump(counters_[t.value].cas_failures);
            break;
        }
    }

    if (node->next(0).load().marked()) search(t, order, w);
    release(g, node);
}

}  // namespace cpq
