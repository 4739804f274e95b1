#include "cpq/skiplist/skiplist.hpp"

#include <sstream>

namespace cpq {

SkipList::SkipList(CounterSet& counters) : counters_(counters) {
    head_ = SkipNode::create(OrderKey{NodeClass::Dummy, 0, 0}, 0, kMaxLevel);
    tail_ = SkipNode::create(OrderKey{NodeClass::Tail, std::numeric_limits<Key>::max(),
                                      std::numeric_limits<std::uint64_t>::max()},
                             0, kMaxLevel);
    for (int i = 0; i < kLevels; ++i) head_->next(i).store(MarkedPtr(tail_, false));
}

SkipList::~SkipList() {
    SkipNode* n = head_->next(0).load().ptr();
    while (n != tail_) {
        SkipNode* next = n->next(0).load().ptr();
        SkipNode::destroy(n);
        n = next;
    }
    SkipNode::destroy(head_);
    SkipNode::destroy(tail_);
}

void SkipList::search(ThreadId t, const OrderKey& target, Window& w) {
retry:
    SkipNode* pred = head_;
    for (int level = kMaxLevel; level >= 0; --level) {
        SkipNode* curr = pred->next(level).load().ptr();
        for (;;) {
            curr->audit();
            MarkedPtr succ = curr->next(level).load();
            while (succ.marked()) {
                if (!pred->next(level).compare_exchange(MarkedPtr(curr, false),
                                                        MarkedPtr(succ.ptr(), false))) {
                    bump(counters_[t.value].cas_failures);
                    goto retry;
                }
                curr = succ.ptr();
                curr->audit();
                succ = curr->next(level).load();
            }
            if (curr != tail_ && curr->order < target) {
                pred = curr;
                curr = succ.ptr();
            } else {
                break;
            }
        }
        w.preds[level] = pred;
        w.succs[level] = curr;
    }
}

bool SkipList::mark_delete(SkipNode* node) {
    for (int i = node->top_level; i >= 1; --i) node->next(i).fetch_mark();
    return !node->next(0).fetch_mark().marked();
}

void SkipList::finish_delete(const EpochReclaimer::Guard& g, SkipNode* node) {
    Window w;
    search(g.thread(), node->order, w);
    release(g, node);
}

void SkipList::release(const EpochReclaimer::Guard& g, SkipNode* node) {
    if (node->owners.fetch_sub(1, std::memory_order_acq_rel) == 1) {
        g.retire(node, &SkipNode::destroy, &SkipNode::poison);
    }
}

std::vector<const SkipNode*> SkipList::level_nodes(int level) const {
    std::vector<const SkipNode*> out;
    for (const SkipNode* n = head_->next(level).load().ptr(); n != tail_;
         n = n->next(level).load().ptr()) {
        out.push_back(n);
    }
    return out;
}

std::string SkipList::check_structure() const {
    std::ostringstream err;
    std::vector<const SkipNode*> below;
    for (int level = 0; level < kLevels; ++level) {
        std::vector<const SkipNode*> nodes = level_nodes(level);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            if (!(nodes[i - 1]->order < nodes[i]->order)) {
                err << "level " << level << " not strictly ascending at position " << i << "\n";
            }
        }
        if (level > 0) {
            std::size_t j = 0;
            for (const SkipNode* n : nodes) {
                while (j < below.size() && below[j] != n) ++j;
                if (j == below.size()) {
                    err << "node at level " << level << " missing from level " << level - 1 << "\n";
                    break;
                }
            }
        }
        below = std::move(nodes);
    }
    return err.str();
}

}  // namespace cpq
