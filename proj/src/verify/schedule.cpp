#include "cpq/verify/schedule.hpp"

#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "cpq/core/yield.hpp"
#include "cpq/verify/recorder.hpp"

namespace cpq::verify {

namespace {

constexpr int kController = -1;

class Scheduler final : public YieldHook {
public:
    struct Worker {
        unsigned id = 0;
        bool finished = false;
        bool has_target = false;
        std::string target;
        unsigned remaining = 0;
        std::thread thread;
    };

    Scheduler(AnyQueue& queue, const std::vector<ThreadScript>& scripts)
        : scripts_(scripts), recorder_(static_cast<unsigned>(scripts.size())), queue_(queue, recorder_) {
        workers_.resize(scripts.size());
        result_.pops.resize(scripts.size());
        for (unsigned i = 0; i < scripts.size(); ++i) workers_[i].id = i;
    }

    ScheduleResult run(const std::vector<Step>& steps) {
        install_yield_hook(this);
        for (Worker& w : workers_) w.thread = std::thread([this, &w] { body(w); });

        std::string desync;
        for (const Step& s : steps) {
            if (s.thread >= workers_.size()) {
                desync = "step names thread " + std::to_string(s.thread) + " which has no script";
                break;
            }
            Worker& w = workers_[s.thread];
            std::unique_lock lk(mutex_);
            if (w.finished) {
                desync = "thread " + std::to_string(s.thread) + " already finished before '" + s.label + "'";
                break;
            }
            w.target = s.label;
            w.remaining = s.occurrences;
            w.has_target = s.occurrences > 0;
            if (!w.has_target) continue;
            hand_to(lk, static_cast<int>(w.id));
            if (w.has_target) {
                w.has_target = false;
                desync = "thread " + std::to_string(s.thread) + " finished its script without reaching '" +
                         s.label + "'";
                break;
            }
        }

        {
            std::unique_lock lk(mutex_);
            free_run_ = true;
            for (Worker& w : workers_) {
                if (!w.finished) hand_to(lk, static_cast<int>(w.id));
            }
        }
        for (Worker& w : workers_) w.thread.join();
        install_yield_hook(nullptr);
        if (!desync.empty()) throw ScriptDesync(desync);
        result_.history = recorder_.history();
        return std::move(result_);
    }

    void on_yield(std::string_view label) override {
        Worker* w = current_;
        if (w == nullptr || owner_ != this) return;
        std::unique_lock lk(mutex_);
        if (free_run_ || !w->has_target || label != w->target) return;
        if (--w->remaining > 0) return;
        w->has_target = false;
        running_ = kController;
        cv_.notify_all();
        cv_.wait(lk, [&] { return running_ == static_cast<int>(w->id); });
    }

private:
    // Passes control to a worker and waits until it hands control back.
    void hand_to(std::unique_lock<std::mutex>& lk, int id) {
        running_ = id;
        cv_.notify_all();
        cv_.wait(lk, [&] { return running_ == kController; });
    }

    void body(Worker& w) {
        current_ = &w;
        owner_ = this;
        {
            std::unique_lock lk(mutex_);
            cv_.wait(lk, [&] { return running_ == static_cast<int>(w.id); });
        }
        const ThreadId tid(w.id);
        std::uint64_t n = 0;
        for (const ScriptedOp& op : scripts_[w.id]) {
            if (op.op == OpKind::Insert) {
                queue_.insert(tid, Entry{op.key, (static_cast<Payload>(w.id) << 32) | n});
            } else {
                result_.pops[w.id].push_back(queue_.delete_min(tid));
            }
            ++n;
            on_yield(kOpDone);
        }
        std::unique_lock lk(mutex_);
        w.finished = true;
        running_ = kController;
        cv_.notify_all();
        current_ = nullptr;
    }

    static thread_local Worker* current_;
    static thread_local Scheduler* owner_;

    const std::vector<ThreadScript>& scripts_;
    Recorder recorder_;
    RecordingQueue queue_;
    std::vector<Worker> workers_;
    ScheduleResult result_;
    std::mutex mutex_;
    std::condition_variable cv_;
    int running_ = kController;
    bool free_run_ = false;
};

thread_local Scheduler::Worker* Scheduler::current_ = nullptr;
thread_local Scheduler* Scheduler::owner_ = nullptr;

}  // namespace

ScheduleResult run_schedule(AnyQueue& queue, const std::vector<ThreadScript>& scripts,
                            const std::vector<Step>& steps) {
    Scheduler scheduler(queue, scripts);
    return scheduler.run(steps);
}

}  // namespace cpq::verify
