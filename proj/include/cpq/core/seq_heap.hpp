#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cpq/core/entry.hpp"

namespace cpq {

// Array-backed binary min-heap. Single threaded; serves as the reference
// implementation and as the local heap inside the k-relaxed queue.
template <class T, class Less = std::less<T>>
class SeqHeap {
public:
    SeqHeap() = default;
    explicit SeqHeap(Less less) : less_(std::move(less)) {}

    void push(T value) {
        items_.push_back(std::move(value));
        sift_up(items_.size() - 1);
    }

    std::optional<T> pop() {
        if (items_.empty()) return std::nullopt;
        T top = std::move(items_.front());
        items_.front() = std::move(items_.back());
        items_.pop_back();
        if (!items_.empty()) sift_down(0);
        return top;
    }

    const T* top() const { return items_.empty() ? nullptr : &items_.front(); }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    void clear() { items_.clear(); }
    void reserve(std::size_t n) { items_.reserve(n); }

    const std::vector<T>& storage() const { return items_; }

    bool is_heap() const {
        for (std::size_t i = 1; i < items_.size(); ++i) {
            if (less_(items_[i], items_[(i - 1) / 2])) return false;
        }
        return true;
    }

private:
    void sift_up(std::size_t i) {
        while (i > 0) {
            std::size_t parent = (i - 1) / 2;
            if (!less_(items_[i], items_[parent])) break;
            std::swap(items_[i], items_[parent]);
            i = parent;
        }
    }

    void sift_down(std::size_t i) {
        const std::size_t n = items_.size();
        for (;;) {
            std::size_t l = 2 * i + 1;
            if (l >= n) break;
            std::size_t m = l;
            if (l + 1 < n && less_(items_[l + 1], items_[l])) m = l + 1;
            if (!less_(items_[m], items_[i])) break;
            std::swap(items_[i], items_[m]);
            i = m;
        }
    }

    std::vector<T> items_;
    [[no_unique_address]] Less less_;
};

// Sequential priority queue with the same interface and tie policy (FIFO among
// equal keys) as the concurrent strict queues.
class SeqOracle {
public:
    void insert(Entry e) { heap_.push(SequencedEntry{e, next_seq_++}); }

    PopResult delete_min() {
        auto top = heap_.pop();
        if (!top) return std::nullopt;
        return top->entry;
    }

    std::size_t size() const { return heap_.size(); }
    bool empty() const { return heap_.empty(); }

private:
    SeqHeap<SequencedEntry> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace cpq
