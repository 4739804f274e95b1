#include "cpq/skiplist/node.hpp"

#include <new>

namespace cpq {

namespace {
constexpr std::size_t round_up(std::size_t n, std::size_t a) { return (n + a - 1) / a * a; }
}

const std::size_t SkipNode::kHeaderSize = round_up(sizeof(SkipNode), alignof(MarkedLink));

SkipNode* SkipNode::create(OrderKey order, Payload payload, int top_level) {
    const std::size_t bytes = kHeaderSize + static_cast<std::size_t>(top_level + 1) * sizeof(MarkedLink);
    void* mem = ::operator new(bytes, std::align_val_t{alignof(SkipNode)});
    auto* node = new (mem) SkipNode(order, payload, top_level);
    for (int i = 0; i <= top_level; ++i) new (&node->links()[i]) MarkedLink();
    return node;
}

void SkipNode::destroy(void* p) {
    auto* node = static_cast<SkipNode*>(p);
    for (int i = 0; i <= node->top_level; ++i) node->links()[i].~MarkedLink();
    node->~SkipNode();
    ::operator delete(p, std::align_val_t{alignof(SkipNode)});
}

void SkipNode::poison(void* p) {
    static_cast<SkipNode*>(p)->canary.store(audit::kPoisoned, std::memory_order_relaxed);
}

}  // namespace cpq
