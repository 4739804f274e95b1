// Offline checks over recorded operation histories.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cpq/verify/checkers.hpp"

namespace {

cpq::verify::History load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return cpq::verify::read_history(in);
}

int report(const cpq::verify::Verdict& v, const char* property) {
    if (v.ok) {
        std::cout << property << ": yes\n";
        return 0;
    }
    std::cout << property << ": no\n" << v.explanation << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Check recorded priority queue histories"};
    app.require_subcommand(1);

    std::string path;
    std::size_t max_ops = cpq::verify::kExhaustiveOpBound;
    std::uint64_t bound = 0;

    auto* lin = app.add_subcommand("linearizable", "Exhaustive linearizability check");
    lin->add_option("history", path)->required()->check(CLI::ExistingFile);
    lin->add_option("--max-ops", max_ops, "Refuse larger histories")->capture_default_str();

    auto* qc = app.add_subcommand("quiescent", "Quiescent consistency check");
    qc->add_option("history", path)->required()->check(CLI::ExistingFile);
    qc->add_option("--max-ops", max_ops, "Refuse larger quiescent segments")->capture_default_str();

    auto* rank = app.add_subcommand("rank", "Rank of every DeleteMin result");
    rank->add_option("history", path)->required()->check(CLI::ExistingFile);
    rank->add_option("--bound", bound, "Count ranks above this bound as violations");

    CLI11_PARSE(app, argc, argv);

    try {
        const cpq::verify::History h = load(path);
        if (*lin) return report(cpq::verify::check_linearizable(h, max_ops), "linearizable");
        if (*qc) return report(cpq::verify::check_quiescent(h, max_ops), "quiescently consistent");
        const auto r = cpq::verify::rank_replay(h, bound ? bound : UINT64_MAX);
        std::cout << "pops " << r.ranks.size() << "\nempty " << r.empty_pops << "\nmax_rank " << r.max_rank
                  << "\nviolations " << r.violations << "\nunknown_keys " << r.unknown_keys << "\n";
        return r.violations == 0 && r.unknown_keys == 0 ? 0 : 1;
    } catch (const cpq::verify::HistoryTooLarge& e) {
        std::cerr << "history too large: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
