#pragma once

#include <algorithm>
#include <cstdlib>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qdnet/sat/cnf.hpp"

namespace qdnet::sat {

/// (variable, value): the value dot QD_{i,v}. Variables are 1-based.
struct Dot {
    int var = 0;
    int value = 0;

    auto operator<=>(const Dot&) const = default;
};

/// Position of QD_{i,v} in flat per-dot arrays: 2(i-1) + v.
inline std::size_t dot_index(Dot d) { return 2 * static_cast<std::size_t>(d.var - 1) + static_cast<std::size_t>(d.value); }
inline Dot dot_at(std::size_t index) { return {static_cast<int>(index / 2) + 1, static_cast<int>(index % 2)}; }

/// If every X in `premise` is +1 at step t, stimulate every dot in `target`
/// at step t+1. Both lists are sorted and free of duplicates.
struct BounceRule {
    std::vector<Dot> premise;
    std::vector<Dot> target;

    auto operator<=>(const BounceRule&) const = default;
};

struct RuleSet {
    std::vector<BounceRule> intra;
    std::vector<BounceRule> inter;
    std::vector<BounceRule> contra;

    std::size_t size() const { return intra.size() + inter.size() + contra.size(); }

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (const auto& r : intra) fn(r);
        for (const auto& r : inter) fn(r);
        for (const auto& r : contra) fn(r);
    }
};

/// Dot assignment that makes a literal false: x_j false is (j,0), not x_j false is (j,1).
inline Dot falsifying_dot(int lit) { return {std::abs(lit), lit > 0 ? 0 : 1}; }

/// INTRA: X_{i,v} = 1 stimulates QD_{i,1-v}.
/// INTER: for literal l of variable i in clause C, once every other literal
///   of C is falsified, stimulate the dot that would falsify l.
/// CONTRA: for every pair of INTER rules aiming at (i,0) and (i,1), the
///   union U of their premises gives (U, U).
/// Identical rules are stored once.
inline RuleSet compile_rules(const CnfFormula& f) {
    validate(f);
    RuleSet rules;
    rules.intra.reserve(2 * static_cast<std::size_t>(f.num_vars));
    for (int i = 1; i <= f.num_vars; ++i)
        for (int v = 0; v < 2; ++v) rules.intra.push_back({{{i, v}}, {{i, 1 - v}}});

    std::set<BounceRule> seen;
    // INTER rule indices per (variable, targeted value)
    std::vector<std::vector<std::size_t>> aimed(2 * static_cast<std::size_t>(f.num_vars));
    for (const auto& clause : f.clauses) {
        for (int lit : clause) {
            BounceRule r;
            for (int other : clause)
                if (other != lit) r.premise.push_back(falsifying_dot(other));
            std::sort(r.premise.begin(), r.premise.end());
            r.target = {falsifying_dot(lit)};
            if (!seen.insert(r).second) continue;
            aimed[dot_index(r.target[0])].push_back(rules.inter.size());
            rules.inter.push_back(std::move(r));
        }
    }

    std::set<std::vector<Dot>> contra_seen;
    for (int i = 1; i <= f.num_vars; ++i) {
        for (std::size_t a : aimed[dot_index({i, 0})]) {
            for (std::size_t b : aimed[dot_index({i, 1})]) {
                std::vector<Dot> u;
                const auto& pa = rules.inter[a].premise;
                const auto& pb = rules.inter[b].premise;
                std::set_union(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(u));
                if (!contra_seen.insert(u).second) continue;
                rules.contra.push_back({u, u});
            }
        }
    }
    return rules;
}

/// Dots stimulated at t+1 when exactly the dots in `positive` have X = +1.
inline std::set<Dot> fired_targets(const RuleSet& rules, const std::set<Dot>& positive) {
    std::set<Dot> out;
    rules.for_each([&](const BounceRule& r) {
        if (std::all_of(r.premise.begin(), r.premise.end(), [&](Dot d) { return positive.contains(d); }))
            out.insert(r.target.begin(), r.target.end());
    });
    return out;
}

inline std::string to_string(Dot d) { return "(" + std::to_string(d.var) + "," + std::to_string(d.value) + ")"; }

inline std::string to_string(const BounceRule& r) {
    std::string s = "{";
    for (std::size_t k = 0; k < r.premise.size(); ++k) s += (k ? " " : "") + to_string(r.premise[k]);
    s += "} -> {";
    for (std::size_t k = 0; k < r.target.size(); ++k) s += (k ? " " : "") + to_string(r.target[k]);
    return s + "}";
}

}  // namespace qdnet::sat
