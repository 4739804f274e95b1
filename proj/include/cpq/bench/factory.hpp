#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpq/core/any_queue.hpp"

namespace cpq::bench {

struct QueueConfig {
    std::string name = "linden";
    unsigned threads = 1;
    unsigned bound_offset = 32;
    unsigned k = 64;
    std::size_t capacity = std::size_t{1} << 18;
    std::uint64_t seed = 1;
    bool quarantine = false;
    // Spray width; 0 tunes it for `threads`.
    unsigned spray_threads = 0;
};

class UnknownQueue : public std::invalid_argument {
public:
    explicit UnknownQueue(std::string_view name)
        : std::invalid_argument("unknown queue '" + std::string(name) + "'") {}
};

// globallock, hunt, shavitlotan, linden, spray, krelaxed
const std::vector<std::string>& queue_names();
bool is_strict(std::string_view name);

std::unique_ptr<AnyQueue> make_queue(const QueueConfig& config);

}  // namespace cpq::bench
