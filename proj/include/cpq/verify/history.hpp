#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpq/core/entry.hpp"

namespace cpq::verify {

enum class EventKind : std::uint8_t { Invoke, Respond };
enum class OpKind : std::uint8_t { Insert, DeleteMin };

// One invocation or response. `value` is the key for inserts, the returned key
// for a DeleteMin response (nullopt = Empty) and unused for a DeleteMin
// invocation.
struct Event {
    std::uint64_t time = 0;
    unsigned thread = 0;
    EventKind kind = EventKind::Invoke;
    OpKind op = OpKind::Insert;
    std::optional<Key> value;

    friend bool operator==(const Event&, const Event&) = default;
};

using History = std::vector<Event>;

inline constexpr std::uint64_t kPending = std::numeric_limits<std::uint64_t>::max();

// An invocation paired with its response.
struct Operation {
    unsigned thread = 0;
    OpKind op = OpKind::Insert;
    std::optional<Key> value;  // insert argument or DeleteMin result
    std::uint64_t invoke = 0;
    std::uint64_t respond = kPending;

    bool pending() const { return respond == kPending; }
};

class MalformedHistory : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sorts by time and pairs events per thread. Each thread must alternate
// invoke/respond with matching op kinds; a trailing invoke stays pending.
std::vector<Operation> pair_operations(const History& h);

// Text format, one event per line: `time thread kind op value`, where kind is
// invoke|respond, op is insert|deletemin and value is a decimal key, EMPTY for
// an empty DeleteMin response, or '-' for a DeleteMin invocation. Lines
// starting with '#' are ignored.
void write_history(std::ostream& out, const History& h);
History read_history(std::istream& in);

std::string describe(const Operation& op);

}  // namespace cpq::verify
