#include "cpq/verify/history.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace cpq::verify {

std::vector<Operation> pair_operations(const History& h) {
    History sorted = h;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    std::vector<Operation> ops;
    std::map<unsigned, std::size_t> open;  // thread -> index of its pending op
    for (const Event& e : sorted) {
        auto it = open.find(e.thread);
        if (e.kind == EventKind::Invoke) {
            if (it != open.end()) {
                throw MalformedHistory("thread " + std::to_string(e.thread) +
                                       " invokes while an operation is open");
            }
            if (e.op == OpKind::Insert && !e.value) throw MalformedHistory("insert without a key");
            Operation op;
            op.thread = e.thread;
            op.op = e.op;
            op.value = e.op == OpKind::Insert ? e.value : std::nullopt;
            op.invoke = e.time;
            open[e.thread] = ops.size();
            ops.push_back(op);
        } else {
            if (it == open.end()) {
                throw MalformedHistory("thread " + std::to_string(e.thread) +
                                       " responds without an open operation");
            }
            Operation& op = ops[it->second];
            if (op.op != e.op) throw MalformedHistory("response kind does not match invocation");
            if (e.time <= op.invoke) throw MalformedHistory("response not after invocation");
            op.respond = e.time;
            if (op.op == OpKind::DeleteMin) op.value = e.value;
            open.erase(it);
        }
    }
    return ops;
}

void write_history(std::ostream& out, const History& h) {
    for (const Event& e : h) {
        out << e.time << ' ' << e.thread << ' '
            << (e.kind == EventKind::Invoke ? "invoke" : "respond") << ' '
            << (e.op == OpKind::Insert ? "insert" : "deletemin") << ' ';
        if (e.op == OpKind::DeleteMin && e.kind == EventKind::Invoke) {
            out << '-';
        } else if (e.value) {
            out << *e.value;
        } else {
            out << "EMPTY";
        }
        out << '\n';
    }
}

History read_history(std::istream& in) {
    History h;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        Event e;
        std::string kind, op, value;
        if (!(fields >> e.time >> e.thread >> kind >> op >> value)) {
            throw MalformedHistory("line " + std::to_string(lineno) + ": expected 5 fields");
        }
        if (kind == "invoke") {
            e.kind = EventKind::Invoke;
        } else if (kind == "respond") {
            e.kind = EventKind::Respond;
        } else {
            throw MalformedHistory("line " + std::to_string(lineno) + ": bad event kind");
        }
        if (op == "insert") {
            e.op = OpKind::Insert;
        } else if (op == "deletemin") {
            e.op = OpKind::DeleteMin;
        } else {
            throw MalformedHistory("line " + std::to_string(lineno) + ": bad operation");
        }
        if (value != "EMPTY" && value != "-") {
            std::size_t used = 0;
            unsigned long long v = 0;
            try {
                v = std::stoull(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != value.size() || v > std::numeric_limits<Key>::max()) {
                throw MalformedHistory("line " + std::to_string(lineno) + ": bad key");
            }
            e.value = static_cast<Key>(v);
        }
        h.push_back(e);
    }
    return h;
}

std::string describe(const Operation& op) {
    std::ostringstream s;
    s << "T" << op.thread << ' ';
    if (op.op == OpKind::Insert) {
        s << "Insert(" << *op.value << ")";
    } else {
        s << "DeleteMin->";
        if (op.pending()) {
            s << "?";
        } else if (op.value) {
            s << *op.value;
        } else {
            s << "Empty";
        }
    }
    s << " [" << op.invoke << ", ";
    if (op.pending()) {
        s << "pending";
    } else {
        s << op.respond;
    }
    s << "]";
    return s.str();
}

}  // namespace cpq::verify
