#pragma once

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "qdnet/core/error.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/sat/cnf.hpp"
#include "qdnet/sat/nanops.hpp"

namespace qdnet::sat {

struct WalkSatConfig {
    std::uint64_t max_steps = 1'000'000;
    std::uint64_t seed = 1;
};

/// Pure random walk: while some clause is false, pick one of the false
/// clauses uniformly and flip one of its variables uniformly. `steps`
/// counts flips, so an initial model returns after 0 steps.
inline SolveResult walksat_solve(const CnfFormula& formula, Assignment x, std::uint64_t max_steps, Rng& rng) {
    validate(formula);
    require(x.size() == static_cast<std::size_t>(formula.num_vars), "walksat: assignment size does not match formula");
    const std::size_t m = formula.clauses.size();
    std::vector<std::vector<std::uint32_t>> occurs(static_cast<std::size_t>(formula.num_vars));
    std::vector<std::uint32_t> true_count(m, 0);
    // false clauses as a dense list with back-pointers for O(1) removal
    std::vector<std::uint32_t> unsat;
    std::vector<std::int64_t> where(m, -1);
    auto add = [&](std::uint32_t c) {
        where[c] = static_cast<std::int64_t>(unsat.size());
        unsat.push_back(c);
    };
    auto remove = [&](std::uint32_t c) {
        const auto pos = static_cast<std::size_t>(where[c]);
        unsat[pos] = unsat.back();
        where[unsat[pos]] = static_cast<std::int64_t>(pos);
        unsat.pop_back();
        where[c] = -1;
    };
    for (std::uint32_t c = 0; c < m; ++c) {
        for (int lit : formula.clauses[c]) {
            occurs[static_cast<std::size_t>(std::abs(lit) - 1)].push_back(c);
            if (literal_true(lit, x)) ++true_count[c];
        }
        if (true_count[c] == 0) add(c);
    }

    for (std::uint64_t step = 0;; ++step) {
        if (unsat.empty()) {
            if (!evaluate(formula, x)) throw Error("WalkSAT returned an assignment that does not satisfy the formula");
            return {true, step, x};
        }
        if (step == max_steps) return {false, max_steps, x};
        const auto& clause = formula.clauses[unsat[rng.below(unsat.size())]];
        const int var = std::abs(clause[rng.below(clause.size())]);
        const auto i = static_cast<std::size_t>(var - 1);
        x[i] ^= 1u;
        for (auto c : occurs[i]) {
            bool now_true = false;
            for (int lit : formula.clauses[c])
                if (std::abs(lit) == var) now_true = literal_true(lit, x);
            if (now_true) {
                if (true_count[c]++ == 0) remove(c);
            } else {
                if (--true_count[c] == 0) add(c);
            }
        }
    }
}

/// Random initial assignment, one fair draw per variable in order.
inline SolveResult walksat_solve(const CnfFormula& formula, std::uint64_t max_steps, Rng& rng) {
    Assignment x(static_cast<std::size_t>(formula.num_vars));
    for (auto& v : x) v = rng.uniform() < 0.5 ? 1 : 0;
    return walksat_solve(formula, std::move(x), max_steps, rng);
}

inline SolveResult walksat_solve(const CnfFormula& formula, const WalkSatConfig& config) {
    Rng rng(config.seed);
    return walksat_solve(formula, config.max_steps, rng);
}

}  // namespace qdnet::sat
