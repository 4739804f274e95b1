#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpq/verify/history.hpp"

namespace cpq::verify {

// Exhaustive search is exponential; histories (or quiescent segments) with
// more operations than this are refused unless a larger bound is passed.
inline constexpr std::size_t kExhaustiveOpBound = 14;

class HistoryTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Verdict {
    bool ok = false;
    // Indices into the paired operation list, in linearization order.
    std::vector<std::size_t> witness;
    std::string explanation;
};

// Backtracking search over linearization orders against a sequential priority
// queue on keys, memoizing failed states. Pending operations may be linearized
// anywhere after their invocation or dropped; a pending DeleteMin removes the
// current minimum.
Verdict check_linearizable(const std::vector<Operation>& ops,
                           std::size_t max_ops = kExhaustiveOpBound);
Verdict check_linearizable(const History& h, std::size_t max_ops = kExhaustiveOpBound);

// Quiescent consistency: operations separated by a quiescent point (no open
// operation) keep their order; inside a segment any order is allowed.
Verdict check_quiescent(const std::vector<Operation>& ops,
                        std::size_t max_segment_ops = kExhaustiveOpBound);
Verdict check_quiescent(const History& h, std::size_t max_segment_ops = kExhaustiveOpBound);

struct RankReport {
    // One entry per non-empty DeleteMin, in response order. Rank 1 is the
    // minimum of the items the operation had to consider.
    std::vector<std::uint64_t> ranks;
    std::uint64_t max_rank = 0;
    std::uint64_t violations = 0;
    std::uint64_t empty_pops = 0;
    // DeleteMin results that match no live or running insert.
    std::uint64_t unknown_keys = 0;
};

// Replays a history in time order. A DeleteMin returning x has rank 1 + the
// number of live items with a smaller key whose insert responded before the
// DeleteMin was invoked. Items inserted while it ran are not counted. A result
// may come from an insert that has been invoked but has not yet responded.
RankReport rank_replay(const History& h,
                       std::uint64_t bound = std::numeric_limits<std::uint64_t>::max());

}  // namespace cpq::verify
