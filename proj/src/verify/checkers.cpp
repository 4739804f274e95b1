#include "cpq/verify/checkers.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace cpq::verify {

namespace {

using State = std::vector<Key>;  // sorted multiset of keys

// Applies one operation to the sequential priority queue. Returns false when
// the recorded result is impossible from `s`.
bool apply(const Operation& op, State& s) {
    if (op.op == OpKind::Insert) {
        s.insert(std::upper_bound(s.begin(), s.end(), *op.value), *op.value);
        return true;
    }
    if (op.pending()) {
        if (!s.empty()) s.erase(s.begin());
        return true;
    }
    if (!op.value) return s.empty();
    if (s.empty() || s.front() != *op.value) return false;
    s.erase(s.begin());
    return true;
}

class Search {
public:
    Search(const std::vector<Operation>& ops, std::vector<std::size_t> subset, bool real_time)
        : ops_(ops), subset_(std::move(subset)), real_time_(real_time) {
        for (std::size_t i = 0; i < subset_.size(); ++i) {
            if (!ops_[subset_[i]].pending()) required_ |= std::uint64_t{1} << i;
        }
    }

    bool run(const State& start) {
        order_.clear();
        return dfs(0, start);
    }

    // Witness in subset-local order converted to global indices.
    std::vector<std::size_t> witness() const {
        std::vector<std::size_t> w;
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) w.push_back(subset_[*it]);
        return w;
    }

    std::vector<std::size_t> deepest() const {
        std::vector<std::size_t> w;
        for (std::size_t i : deepest_) w.push_back(subset_[i]);
        return w;
    }

private:
    bool minimal(std::uint64_t mask, std::size_t i) const {
        if (!real_time_) return true;
        const Operation& candidate = ops_[subset_[i]];
        for (std::size_t j = 0; j < subset_.size(); ++j) {
            if (j == i || (mask >> j) & 1) continue;
            if (ops_[subset_[j]].respond < candidate.invoke) return false;
        }
        return true;
    }

    bool dfs(std::uint64_t mask, const State& s) {
        if ((mask & required_) == required_) return true;
        if (failed_.count({mask, s})) return false;
        for (std::size_t i = 0; i < subset_.size(); ++i) {
            if ((mask >> i) & 1) continue;
            if (!minimal(mask, i)) continue;
            State next = s;
            if (!apply(ops_[subset_[i]], next)) continue;
            path_.push_back(i);
            if (path_.size() > deepest_.size()) deepest_ = path_;
            const bool found = dfs(mask | (std::uint64_t{1} << i), next);
            path_.pop_back();
            if (found) {
                order_.push_back(i);
                return true;
            }
        }
        failed_.insert({mask, s});
        return false;
    }

    const std::vector<Operation>& ops_;
    std::vector<std::size_t> subset_;
    bool real_time_;
    std::uint64_t required_ = 0;
    std::set<std::pair<std::uint64_t, State>> failed_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> path_;
    std::vector<std::size_t> deepest_;
};

void enforce_bound(std::size_t n, std::size_t max_ops) {
    if (n > max_ops || n > 64) {
        throw HistoryTooLarge("history has " + std::to_string(n) +
                              " operations; exhaustive bound is " + std::to_string(max_ops));
    }
}

std::string explain_failure(const std::vector<Operation>& ops, const std::vector<std::size_t>& subset,
                            const std::vector<std::size_t>& deepest, const char* what) {
    std::ostringstream s;
    s << "no " << what << " order exists; longest valid prefix (" << deepest.size() << " of "
      << subset.size() << " ops):";
    for (std::size_t i : deepest) s << "\n  " << describe(ops[i]);
    s << "\nunplaced:";
    for (std::size_t i : subset) {
        if (std::find(deepest.begin(), deepest.end(), i) == deepest.end()) {
            s << "\n  " << describe(ops[i]);
        }
    }
    return s.str();
}

}  // namespace

Verdict check_linearizable(const std::vector<Operation>& ops, std::size_t max_ops) {
    enforce_bound(ops.size(), max_ops);
    std::vector<std::size_t> all(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) all[i] = i;
    Search search(ops, all, true);
    Verdict v;
    v.ok = search.run({});
    if (v.ok) {
        v.witness = search.witness();
    } else {
        v.explanation = explain_failure(ops, all, search.deepest(), "linearization");
    }
    return v;
}

Verdict check_linearizable(const History& h, std::size_t max_ops) {
    return check_linearizable(pair_operations(h), max_ops);
}

Verdict check_quiescent(const std::vector<Operation>& ops, std::size_t max_segment_ops) {
    std::vector<std::size_t> by_invoke(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) by_invoke[i] = i;
    std::sort(by_invoke.begin(), by_invoke.end(),
              [&](std::size_t a, std::size_t b) { return ops[a].invoke < ops[b].invoke; });

    std::vector<std::vector<std::size_t>> segments;
    std::uint64_t horizon = 0;
    for (std::size_t i : by_invoke) {
        if (segments.empty() || ops[i].invoke > horizon) segments.emplace_back();
        segments.back().push_back(i);
        horizon = std::max(horizon, ops[i].respond);
    }

    Verdict v;
    v.ok = true;
    State state;
    for (const auto& seg : segments) {
        enforce_bound(seg.size(), max_segment_ops);
        Search search(ops, seg, false);
        if (!search.run(state)) {
            v.ok = false;
            v.witness.clear();
            v.explanation = explain_failure(ops, seg, search.deepest(), "quiescently consistent");
            return v;
        }
        for (std::size_t i : search.witness()) {
            v.witness.push_back(i);
            apply(ops[i], state);
        }
    }
    return v;
}

Verdict check_quiescent(const History& h, std::size_t max_segment_ops) {
    return check_quiescent(pair_operations(h), max_segment_ops);
}

namespace {

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i, std::int64_t d) {
        for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += d;
    }
    // Sum over [0, i).
    std::int64_t prefix(std::size_t i) const {
        std::int64_t s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

private:
    std::vector<std::int64_t> tree_;
};

}  // namespace

RankReport rank_replay(const History& h, std::uint64_t bound) {
    const std::vector<Operation> ops = pair_operations(h);

    std::vector<Key> keys;
    for (const Operation& op : ops) {
        if (op.op == OpKind::Insert) keys.push_back(*op.value);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    auto key_index = [&](Key k) {
        return static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin());
    };

    struct Point {
        std::uint64_t time;
        std::size_t op;
        bool response;
    };
    std::vector<Point> points;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        points.push_back({ops[i].invoke, i, false});
        if (!ops[i].pending()) points.push_back({ops[i].respond, i, true});
    }
    std::sort(points.begin(), points.end(),
              [](const Point& a, const Point& b) { return a.time < b.time; });

    Fenwick live_counts(keys.size());
    std::vector<bool> live(ops.size(), false);
    std::unordered_map<Key, std::deque<std::size_t>> live_by_key;
    // Inserts still running can already be visible to a DeleteMin.
    std::unordered_map<Key, std::deque<std::size_t>> in_flight_by_key;
    std::vector<bool> consumed_early(ops.size(), false);
    std::map<std::size_t, std::vector<std::size_t>> open_pops;  // pop -> inserts completed since its invoke

    RankReport report;
    for (const Point& p : points) {
        const Operation& op = ops[p.op];
        if (op.op == OpKind::Insert) {
            if (!p.response) {
                in_flight_by_key[*op.value].push_back(p.op);
                continue;
            }
            if (consumed_early[p.op]) continue;
            auto& flight = in_flight_by_key[*op.value];
            flight.erase(std::find(flight.begin(), flight.end(), p.op));
            live[p.op] = true;
            live_counts.add(key_index(*op.value), 1);
            live_by_key[*op.value].push_back(p.op);
            for (auto& [pop, late] : open_pops) late.push_back(p.op);
            continue;
        }
        if (!p.response) {
            open_pops[p.op];
            continue;
        }
        std::vector<std::size_t> late = std::move(open_pops[p.op]);
        open_pops.erase(p.op);
        if (!op.value) {
            ++report.empty_pops;
            continue;
        }
        const Key x = *op.value;
        auto it = live_by_key.find(x);
        const bool from_live = it != live_by_key.end() && !it->second.empty();
        if (!from_live) {
            auto fl = in_flight_by_key.find(x);
            if (fl == in_flight_by_key.end() || fl->second.empty()) {
                ++report.unknown_keys;
                continue;
            }
        }
        std::int64_t smaller = live_counts.prefix(key_index(x));
        for (std::size_t ins : late) {
            if (live[ins] && *ops[ins].value < x) --smaller;
        }
        const std::uint64_t rank = 1 + static_cast<std::uint64_t>(smaller);
        report.ranks.push_back(rank);
        report.max_rank = std::max(report.max_rank, rank);
        if (rank > bound) ++report.violations;

        if (from_live) {
            const std::size_t removed = it->second.front();
            it->second.pop_front();
            live[removed] = false;
            live_counts.add(key_index(x), -1);
        } else {
            auto& flight = in_flight_by_key[x];
            consumed_early[flight.front()] = true;
            flight.pop_front();
        }
    }
    return report;
}

}  // namespace cpq::verify
