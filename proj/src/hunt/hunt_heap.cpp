#include "cpq/hunt/hunt_heap.hpp"

#include <bit>
#include <mutex>
#include <thread>
#include <utility>

namespace cpq {

namespace {

constexpr auto kEmpty = static_cast<std::uint32_t>(HuntHeap::Tag::Empty);
constexpr auto kAvailable = static_cast<std::uint32_t>(HuntHeap::Tag::Available);

std::size_t reverse_low_bits(std::size_t v, unsigned bits) {
    std::size_t r = 0;
    for (unsigned i = 0; i < bits; ++i) {
        r = (r << 1) | (v & 1);
        v >>= 1;
    }
    return r;
}

}  // namespace

HuntHeap::HuntHeap(HuntOptions options)
    : options_(options),
      array_size_(std::bit_ceil(options.capacity + 1)),
      slots_(std::make_unique<Slot[]>(array_size_)),
      counters_(options.max_threads) {
    if (options_.max_threads == 0) throw BadThreadId();
}

std::size_t HuntHeap::slot_for_count(std::size_t n) {
    const unsigned level = static_cast<unsigned>(std::bit_width(n)) - 1;
    const std::size_t base = std::size_t{1} << level;
    return base | reverse_low_bits(n - base, level);
}

std::size_t HuntHeap::next_insert_slot() const {
    std::lock_guard lock(size_lock_);
    if (size_ >= options_.capacity) throw CapacityExceeded();
    return slot_for_count(size_ + 1);
}

std::size_t HuntHeap::size() const {
    std::lock_guard lock(size_lock_);
    return size_;
}

void HuntHeap::swap_contents(Slot& a, Slot& b) {
    std::swap(a.tag, b.tag);
    std::swap(a.item, b.item);
}

void HuntHeap::insert(ThreadId t, Entry e) {
    check_thread(t, options_.max_threads);
    const std::uint32_t me = kOwnerBase + t.value;

    size_lock_.lock();
    if (size_ >= options_.capacity) {
        size_lock_.unlock();
        throw CapacityExceeded();
    }
    std::size_t i = slot_for_count(++size_);
    const std::uint64_t seq = next_seq_++;
    slots_[i].lock.lock();
    size_lock_.unlock();
    slots_[i].item = SequencedEntry{e, seq};
    slots_[i].tag = me;
    slots_[i].lock.unlock();

    while (i > 1) {
        const std::size_t parent = i / 2;
        Slot& p = slots_[parent];
        Slot& c = slots_[i];
        p.lock.lock();
        c.lock.lock();
        std::size_t next = i;
        bool wait = false;
        if (c.tag != me) {
            next = parent;  // a deletion moved our item up or consumed it
        } else if (p.tag == kAvailable) {
            if (before(c, p)) {
                swap_contents(c, p);
                next = parent;
            } else {
                c.tag = kAvailable;
                next = 0;
            }
        } else {
            wait = true;  // parent is still being sifted by another inserter
        }
        c.lock.unlock();
        p.lock.unlock();
        if (next == 0) return;
        i = next;
        if (wait) std::this_thread::yield();
    }
    if (i == 1) {
        Slot& root = slots_[1];
        root.lock.lock();
        if (root.tag == me) root.tag = kAvailable;
        root.lock.unlock();
    }
}

PopResult HuntHeap::delete_min(ThreadId t) {
    check_thread(t, options_.max_threads);
    ThreadCounters& ctr = counters_[t.value];

    size_lock_.lock();
    if (size_ == 0) {
        size_lock_.unlock();
        return std::nullopt;
    }
    const std::size_t bottom = slot_for_count(size_--);
    Slot& b = slots_[bottom];
    b.lock.lock();
    size_lock_.unlock();
    SequencedEntry moved = b.item;
    b.tag = kEmpty;
    b.lock.unlock();

    Slot& root = slots_[1];
    root.lock.lock();
    bump(ctr.root_acquisitions);
    // An empty root means the item we took was the last one. A root refilled
    // by a concurrent insert may hold a larger item than ours.
    if (root.tag == kEmpty || moved < root.item) {
        root.lock.unlock();
        return moved.entry;
    }
    const Entry out = root.item.entry;
    root.item = moved;
    root.tag = kAvailable;

    // Sift down. In-transit children take part; their owner follows them up.
    std::size_t i = 1;
    for (;;) {
        const std::size_t l = 2 * i;
        const std::size_t r = l + 1;
        if (l >= array_size_) break;
        Slot& left = slots_[l];
        left.lock.lock();
        Slot* right = nullptr;
        if (r < array_size_) {
            right = &slots_[r];
            right->lock.lock();
        }
        Slot* child = nullptr;
        if (left.tag != kEmpty) child = &left;
        if (right && right->tag != kEmpty && (child == nullptr || before(*right, *child))) {
            child = right;
        }
        if (child == &left && right) right->lock.unlock();
        if (child == right) left.lock.unlock();
        if (child == nullptr) {
            left.lock.unlock();
            if (right) right->lock.unlock();
            break;
        }
        if (!before(*child, slots_[i])) {
            child->lock.unlock();
            break;
        }
        swap_contents(*child, slots_[i]);
        slots_[i].lock.unlock();
        i = static_cast<std::size_t>(child - slots_.get());
    }
    slots_[i].lock.unlock();
    return out;
}

bool HuntHeap::heap_order_holds() const {
    for (std::size_t i = 2; i < array_size_; ++i) {
        const Slot& c = slots_[i];
        if (c.tag == kEmpty) continue;
        const Slot& p = slots_[i / 2];
        if (p.tag == kEmpty) return false;
        if (c.item < p.item) return false;
    }
    return true;
}

std::size_t HuntHeap::occupied_slots() const {
    std::size_t n = 0;
    for (std::size_t i = 1; i < array_size_; ++i) n += slots_[i].tag != kEmpty;
    return n;
}

std::vector<Entry> HuntHeap::entries() const {
    std::vector<Entry> out;
    for (std::size_t i = 1; i < array_size_; ++i) {
        if (slots_[i].tag != kEmpty) out.push_back(slots_[i].item.entry);
    }
    return out;
}

}  // namespace cpq
