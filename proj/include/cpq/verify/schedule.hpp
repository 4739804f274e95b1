#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpq/core/any_queue.hpp"
#include "cpq/verify/history.hpp"

namespace cpq::verify {

struct ScriptedOp {
    OpKind op = OpKind::Insert;
    Key key = 0;

    static ScriptedOp insert(Key k) { return {OpKind::Insert, k}; }
    static ScriptedOp delete_min() { return {OpKind::DeleteMin, 0}; }
};

using ThreadScript = std::vector<ScriptedOp>;

// Label reached by a virtual thread each time one of its operations returns.
inline constexpr std::string_view kOpDone = "op.done";

// Run `thread` until it has reached `label` `occurrences` more times, then
// pause it there.
struct Step {
    unsigned thread = 0;
    std::string label{kOpDone};
    unsigned occurrences = 1;
};

inline Step run_until(unsigned thread, std::string_view label, unsigned occurrences = 1) {
    return Step{thread, std::string(label), occurrences};
}
inline Step run_ops(unsigned thread, unsigned count = 1) {
    return Step{thread, std::string(kOpDone), count};
}

class ScriptDesync : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScheduleResult {
    History history;
    // Per thread, per DeleteMin in script order.
    std::vector<std::vector<PopResult>> pops;
};

// Executes one script per virtual thread (thread i uses ThreadId i) on real
// threads, letting exactly one of them run at a time. Control moves only at
// yield points, so a schedule is fully deterministic. After the listed steps,
// the remaining operations run to completion in thread order. Throws
// ScriptDesync if a thread finishes its script before reaching a step's label.
ScheduleResult run_schedule(AnyQueue& queue, const std::vector<ThreadScript>& scripts,
                            const std::vector<Step>& steps);

}  // namespace cpq::verify
