#include "cpq/bench/runner.hpp"

#include <pthread.h>
#include <sched.h>

#include <atomic>
#include <barrier>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "cpq/verify/recorder.hpp"

namespace cpq::bench {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Pins worker i to the i-th CPU this process may use. Fails when there are
// fewer allowed CPUs than workers or the platform refuses.
bool pin_to_core(unsigned worker) {
    cpu_set_t allowed;
    CPU_ZERO(&allowed);
    if (sched_getaffinity(0, sizeof(allowed), &allowed) != 0) return false;
    unsigned seen = 0;
    for (int cpu = 0; cpu < CPU_SETSIZE; ++cpu) {
        if (!CPU_ISSET(cpu, &allowed)) continue;
        if (seen++ == worker) {
            cpu_set_t set;
            CPU_ZERO(&set);
            CPU_SET(cpu, &set);
            return pthread_setaffinity_np(pthread_self(), sizeof(set), &set) == 0;
        }
    }
    return false;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& field) {
    T v{};
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw std::invalid_argument("bad CSV number '" + field + "'");
    }
    return v;
}

}  // namespace

void BenchConfig::validate() const {
    bool known = false;
    for (const std::string& n : queue_names()) known = known || n == queue;
    if (!known) throw ConfigError("unknown queue '" + queue + "'");
    if (threads == 0) throw ConfigError("threads must be positive");
    if (!(duration_s > 0)) throw ConfigError("duration must be positive");
    if (!(insert_ratio >= 0 && insert_ratio <= 1)) throw ConfigError("insert ratio must be in [0, 1]");
    if (repeats == 0) throw ConfigError("repeats must be positive");
    if (bound_offset == 0) throw ConfigError("bound offset must be positive");
    if (k == 0) throw ConfigError("k must be positive");
    if (capacity == 0) throw ConfigError("capacity must be positive");
    if (queue == "hunt" && prefill > capacity) throw ConfigError("prefill exceeds heap capacity");
}

RunResult run_once(const BenchConfig& config, unsigned run_index, verify::Recorder* recorder) {
    config.validate();
    const std::uint64_t run_seed = mix(config.seed) ^ mix(run_index + 1);
    std::unique_ptr<AnyQueue> base = make_queue(QueueConfig{config.queue, config.threads, config.bound_offset,
                                                            config.k, config.capacity, run_seed, false,
                                                            config.spray_threads});
    std::unique_ptr<verify::RecordingQueue> recording;
    AnyQueue* queue = base.get();
    if (recorder) {
        recording = std::make_unique<verify::RecordingQueue>(*base, *recorder);
        queue = recording.get();
    }

    std::mt19937_64 prefill_rng(run_seed);
    for (std::size_t i = 0; i < config.prefill; ++i) {
        queue->insert(ThreadId(0), Entry{static_cast<Key>(prefill_rng() >> 32), i});
    }

    struct alignas(64) Tally {
        std::uint64_t inserts = 0;
        std::uint64_t pops = 0;
        std::uint64_t empty = 0;
    };
    std::vector<Tally> tallies(config.threads);
    std::atomic<bool> stop{false};
    std::atomic<bool> pin_failed{false};
    std::barrier start(static_cast<std::ptrdiff_t>(config.threads) + 1);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    std::vector<std::thread> workers;
    for (unsigned w = 0; w < config.threads; ++w) {
        workers.emplace_back([&, w] {
            if (config.pin_threads && !pin_to_core(w)) pin_failed.store(true);
            std::mt19937_64 rng(run_seed ^ mix(0x5eed0000ULL + w));
            std::bernoulli_distribution do_insert(config.insert_ratio);
            const ThreadId tid(w);
            Tally& tally = tallies[w];
            Payload next_payload = (static_cast<Payload>(w + 1) << 40);
            start.arrive_and_wait();
            try {
                while (!stop.load(std::memory_order_relaxed)) {
                    if (do_insert(rng)) {
                        queue->insert(tid, Entry{static_cast<Key>(rng() >> 32), next_payload++});
                        ++tally.inserts;
                    } else {
                        if (!queue->delete_min(tid)) ++tally.empty;
                        ++tally.pops;
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop.store(true);
            }
        });
    }

    start.arrive_and_wait();
    const auto t0 = std::chrono::steady_clock::now();
    std::this_thread::sleep_for(std::chrono::duration<double>(config.duration_s));
    stop.store(true);
    for (std::thread& t : workers) t.join();
    const auto t1 = std::chrono::steady_clock::now();
    if (failure) std::rethrow_exception(failure);

    RunResult r;
    r.queue = config.queue;
    r.threads = config.threads;
    r.run = run_index;
    r.duration_s = std::chrono::duration<double>(t1 - t0).count();
    for (const Tally& t : tallies) {
        r.inserts += t.inserts;
        r.pops += t.pops;
        r.empty_pops += t.empty;
    }
    r.ops_total = r.inserts + r.pops;
    r.throughput = static_cast<double>(r.ops_total) / r.duration_s;
    const QueueStats s = base->stats();
    r.cas_failures = s.cas_failures;
    r.restructures = s.restructures;
    r.spray_retries = s.spray_retries;
    r.pinned = config.pin_threads && !pin_failed.load();
    return r;
}

std::vector<RunResult> run_bench(const BenchConfig& config) {
    config.validate();
    std::vector<RunResult> runs;
    for (unsigned i = 0; i < config.repeats; ++i) runs.push_back(run_once(config, i));
    return runs;
}

Aggregate aggregate(const std::vector<RunResult>& runs) {
    Aggregate a;
    if (runs.empty()) return a;
    for (const RunResult& r : runs) a.mean_throughput += r.throughput;
    a.mean_throughput /= static_cast<double>(runs.size());
    if (runs.size() > 1) {
        double ss = 0;
        for (const RunResult& r : runs) ss += (r.throughput - a.mean_throughput) * (r.throughput - a.mean_throughput);
        a.stddev_throughput = std::sqrt(ss / static_cast<double>(runs.size() - 1));
    }
    return a;
}

void write_csv(std::ostream& out, const std::vector<RunResult>& runs) {
    out << kCsvHeader << '\n';
    for (const RunResult& r : runs) {
        out << r.queue << ',' << r.threads << ',' << r.run << ',' << format_double(r.duration_s) << ','
            << r.ops_total << ',' << format_double(r.throughput) << ',' << r.cas_failures << ','
            << r.restructures << '\n';
    }
    const Aggregate a = aggregate(runs);
    out << "# runs=" << runs.size() << " mean_throughput=" << format_double(a.mean_throughput)
        << " stddev_throughput=" << format_double(a.stddev_throughput) << '\n';
}

std::vector<RunResult> parse_csv(std::istream& in) {
    std::vector<RunResult> runs;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 8) throw std::invalid_argument("expected 8 CSV fields");
        RunResult r;
        r.queue = f[0];
        r.threads = parse_number<unsigned>(f[1]);
        r.run = parse_number<unsigned>(f[2]);
        r.duration_s = parse_number<double>(f[3]);
        r.ops_total = parse_number<std::uint64_t>(f[4]);
        r.throughput = parse_number<double>(f[5]);
        r.cas_failures = parse_number<std::uint64_t>(f[6]);
        r.restructures = parse_number<std::uint64_t>(f[7]);
        runs.push_back(r);
    }
    return runs;
}

void write_gnuplot(std::ostream& out, const std::vector<RunResult>& runs) {
    const Aggregate a = aggregate(runs);
    out << "# queue " << (runs.empty() ? std::string() : runs.front().queue) << "\n";
    out << "# threads mean_throughput stddev_throughput\n";
    out << (runs.empty() ? 0u : runs.front().threads) << ' ' << format_double(a.mean_throughput) << ' '
        << format_double(a.stddev_throughput) << '\n';
}

}  // namespace cpq::bench
