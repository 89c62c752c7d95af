// Writes uniform random 3-SAT instances that are known to be satisfiable,
// in the same layout as the SATLIB uf* archives.
//
//   make_instances --vars 20 --clauses 91 --count 20 --seed 2020 --out tests/data/uf20-91

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <vector>

#include <CLI11.hpp>

#include "qdnet/core/random.hpp"
#include "qdnet/sat/cnf.hpp"

namespace {

using qdnet::sat::Clause;

// Plain DPLL with unit propagation. Only used to filter generated instances.
bool dpll(const std::vector<Clause>& clauses, std::vector<int>& value) {
    std::vector<int> trail;
    for (;;) {
        bool changed = false;
        for (const auto& c : clauses) {
            int open = 0, last = 0;
            bool sat = false;
            for (int lit : c) {
                const int v = value[static_cast<std::size_t>(std::abs(lit))];
                if (v == 0) {
                    ++open;
                    last = lit;
                } else if ((v > 0) == (lit > 0)) {
                    sat = true;
                    break;
                }
            }
            if (sat) continue;
            if (open == 0) {
                for (int v : trail) value[static_cast<std::size_t>(v)] = 0;
                return false;
            }
            if (open == 1) {
                value[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
                trail.push_back(std::abs(last));
                changed = true;
            }
        }
        if (!changed) break;
    }
    std::size_t branch = 0;
    for (std::size_t i = 1; i < value.size() && !branch; ++i)
        if (value[i] == 0) branch = i;
    if (!branch) return true;
    for (int choice : {1, -1}) {
        value[branch] = choice;
        if (dpll(clauses, value)) return true;
    }
    value[branch] = 0;
    for (int v : trail) value[static_cast<std::size_t>(v)] = 0;
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate satisfiable uniform random 3-SAT instances"};
    int vars = 20;
    std::size_t clauses = 91;
    std::size_t count = 20;
    std::uint64_t seed = 1;
    std::string out;
    app.add_option("--vars", vars, "variables per instance")->check(CLI::PositiveNumber);
    app.add_option("--clauses", clauses, "clauses per instance")->check(CLI::PositiveNumber);
    app.add_option("--count", count, "number of instances")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--out", out, "output directory")->required();
    CLI11_PARSE(app, argc, argv);

    std::filesystem::create_directories(out);
    qdnet::Rng rng(seed);
    std::size_t written = 0, rejected = 0;
    while (written < count) {
        const auto f = qdnet::sat::random_ksat(vars, clauses, rng);
        std::vector<int> value(static_cast<std::size_t>(vars) + 1, 0);
        if (!dpll(f.clauses, value)) {
            ++rejected;
            continue;
        }
        ++written;
        const std::string stem = "uf" + std::to_string(vars) + "-0" + std::to_string(written);
        std::ofstream file(std::filesystem::path(out) / (stem + ".cnf"));
        file << "c uniform random 3-SAT, satisfiable (checked by DPLL)\n"
             << "c generator seed " << seed << ", instance " << written << "\n"
             << qdnet::sat::to_dimacs(f) << "%\n0\n\n";
    }
    std::cerr << "wrote " << written << " instances, rejected " << rejected << " unsatisfiable\n";
    return 0;
}
