#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpq/bench/factory.hpp"

namespace cpq::verify {
class Recorder;
}

namespace cpq::bench {

struct BenchConfig {
    std::string queue = "linden";
    unsigned threads = 1;
    std::size_t prefill = 32768;
    double duration_s = 10.0;
    double insert_ratio = 0.5;
    unsigned repeats = 10;
    std::uint64_t seed = 1;
    unsigned bound_offset = 32;
    unsigned k = 64;
    std::size_t capacity = std::size_t{1} << 18;
    unsigned spray_threads = 0;  // 0: tune the spray width for `threads`
    bool pin_threads = true;

    // Throws ConfigError on an invalid combination.
    void validate() const;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunResult {
    std::string queue;
    unsigned threads = 0;
    unsigned run = 0;
    double duration_s = 0;
    std::uint64_t ops_total = 0;
    double throughput = 0;  // operations per second
    std::uint64_t cas_failures = 0;
    std::uint64_t restructures = 0;
    // Not part of the CSV.
    std::uint64_t spray_retries = 0;
    bool pinned = false;  // every worker got its own core
    std::uint64_t inserts = 0;
    std::uint64_t pops = 0;
    std::uint64_t empty_pops = 0;
};

// Prefills a fresh queue single-threaded (untimed), then runs `threads`
// workers doing a random insert/delete_min mix for `duration_s`. Prefill keys
// depend only on the seed and run index, never on the thread count. When a
// recorder is given, every operation, prefill included, is recorded.
RunResult run_once(const BenchConfig& config, unsigned run_index, verify::Recorder* recorder = nullptr);

std::vector<RunResult> run_bench(const BenchConfig& config);

struct Aggregate {
    double mean_throughput = 0;
    double stddev_throughput = 0;
};
Aggregate aggregate(const std::vector<RunResult>& runs);

inline constexpr const char* kCsvHeader =
    "queue,threads,run,duration_s,ops_total,throughput,cas_failures,restructures";

// Header, one row per run, then a '#' line with the aggregate.
void write_csv(std::ostream& out, const std::vector<RunResult>& runs);
// Reads rows written by write_csv; comment lines are skipped.
std::vector<RunResult> parse_csv(std::istream& in);
// Whitespace columns: threads mean_throughput stddev_throughput.
void write_gnuplot(std::ostream& out, const std::vector<RunResult>& runs);

}  // namespace cpq::bench
