#include "cpq/bench/factory.hpp"

#include "cpq/core/global_lock_queue.hpp"
#include "cpq/hunt/hunt_heap.hpp"
#include "cpq/krelaxed/krelaxed_queue.hpp"
#include "cpq/linden/linden_queue.hpp"
#include "cpq/shavit_lotan/shavit_lotan_queue.hpp"
#include "cpq/spray/spray_queue.hpp"

namespace cpq::bench {

const std::vector<std::string>& queue_names() {
    static const std::vector<std::string> names = {"globallock", "hunt",  "shavitlotan",
                                                   "linden",     "spray", "krelaxed"};
    return names;
}

bool is_strict(std::string_view name) {
    return name == "globallock" || name == "hunt" || name == "shavitlotan" || name == "linden";
}

std::unique_ptr<AnyQueue> make_queue(const QueueConfig& c) {
    if (c.name == "globallock") {
        return std::make_unique<QueueAdapter<GlobalLockQueue>>(c.name, c.threads);
    }
    if (c.name == "hunt") {
        return std::make_unique<QueueAdapter<HuntHeap>>(c.name, HuntOptions{c.threads, c.capacity});
    }
    if (c.name == "shavitlotan") {
        return std::make_unique<QueueAdapter<ShavitLotanQueue>>(
            c.name, ShavitLotanOptions{.max_threads = c.threads, .seed = c.seed, .quarantine = c.quarantine});
    }
    if (c.name == "linden") {
        return std::make_unique<QueueAdapter<LindenQueue>>(
            c.name, LindenOptions{c.threads, c.bound_offset, c.seed, c.quarantine});
    }
    if (c.name == "spray") {
        return std::make_unique<QueueAdapter<SprayQueue>>(
            c.name, SprayOptions{.max_threads = c.threads,
                                 .spray_threads = c.spray_threads,
                                 .params = std::nullopt,
                                 .seed = c.seed,
                                 .quarantine = c.quarantine});
    }
    if (c.name == "krelaxed") {
        return std::make_unique<QueueAdapter<KRelaxedQueue>>(
            c.name, KRelaxedOptions{c.threads, c.k, c.seed, c.quarantine});
    }
    throw UnknownQueue(c.name);
}

}  // namespace cpq::bench
