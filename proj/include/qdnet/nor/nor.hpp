#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdnet/core/error.hpp"
#include "qdnet/core/format.hpp"
#include "qdnet/core/parallel.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/qd/profile.hpp"

namespace qdnet::nor {

using qd::PatternMask;
using Bits = std::vector<std::uint8_t>;

inline PatternMask to_mask(const Bits& x) {
    PatternMask m = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) m |= PatternMask{1} << i;
    return m;
}

inline Bits from_mask(PatternMask m, std::size_t n) {
    Bits x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (m >> i) & 1u;
    return x;
}

/// "0101" style, x_1 first.
inline std::string bit_string(const Bits& x) {
    std::string s;
    for (auto b : x) s += b ? '1' : '0';
    return s;
}

inline Bits parse_bits(const std::string& text) {
    Bits x;
    for (char c : text) {
        if (c == ',' || c == ' ') continue;
        require(c == '0' || c == '1', "bit vector may only contain 0 and 1: '" + text + "'");
        x.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return x;
}

/// Dots to block at the next cycle: every ring neighbour of a dot with x = 1.
inline PatternMask bounceback_nor(const Bits& x) {
    const std::size_t n = x.size();
    require(n >= 3, "NOR ring needs at least 3 variables");
    PatternMask blocked = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (x[(j + n - 1) % n] || x[(j + 1) % n]) blocked |= PatternMask{1} << j;
    return blocked;
}

/// Same rule expressed on the lower levels of a qd network.
inline qd::ControlPattern bounceback_nor(const qd::QdNetwork& net, const Bits& x) {
    const auto dests = net.destination_dots();
    require(dests.size() == x.size(), "bounceback_nor: network has " + std::to_string(dests.size()) + " destinations");
    return qd::control_pattern(net, dests, bounceback_nor(x));
}

inline bool is_correct_solution(const Bits& x) {
    const std::size_t n = x.size();
    require(n >= 3, "NOR ring needs at least 3 variables");
    for (std::size_t i = 0; i < n; ++i) {
        const bool expected = !(x[(i + n - 1) % n] || x[(i + 1) % n]);
        if (static_cast<bool>(x[i]) != expected) return false;
    }
    return true;
}

/// All correct solutions of the n-ring in ascending mask order.
inline std::vector<Bits> correct_solutions(std::size_t n) {
    require(n >= 3 && n <= 24, "correct_solutions: 3..24 variables");
    std::vector<Bits> out;
    for (PatternMask m = 0; m < (PatternMask{1} << n); ++m) {
        auto x = from_mask(m, n);
        if (is_correct_solution(x)) out.push_back(std::move(x));
    }
    return out;
}

/// Column label of a correct solution. For N = 4 the two solutions carry
/// their customary names, State (7) = {0,1,0,1} and State (10) = {1,0,1,0}.
inline std::string solution_label(const Bits& x) {
    if (x == Bits{0, 1, 0, 1}) return "state7";
    if (x == Bits{1, 0, 1, 0}) return "state10";
    return "state_" + bit_string(x);
}

struct NorState {
    Bits x;
    PatternMask controls = 0;
    std::size_t t = 0;
};

inline NorState initial_state(Bits x) {
    NorState s;
    s.controls = bounceback_nor(x);
    s.x = std::move(x);
    return s;
}

/// One cycle: sample radiation under the current controls, then derive the
/// next controls from what was observed.
template <class Profile>
NorState nor_step(const NorState& state, const Profile& profile, Rng& rng) {
    require(profile.size() == state.x.size(), "nor_step: profile size does not match N");
    NorState next;
    next.x = qd::sample_radiation(profile.probabilities(state.controls), rng);
    next.controls = bounceback_nor(next.x);
    next.t = state.t + 1;
    return next;
}

/// Probability of observing `to` one cycle after observing `from`.
template <class Profile>
double transition_probability(const Profile& profile, const Bits& from, const Bits& to) {
    const auto& p = profile.probabilities(bounceback_nor(from));
    double prob = 1.0;
    for (std::size_t i = 0; i < to.size(); ++i) prob *= to[i] ? p[i] : 1.0 - p[i];
    return prob;
}

struct NorRunConfig {
    std::size_t n = 4;
    double gain = 1.0;
    std::size_t cycles = 30;
    std::size_t trials = 1000;
    Bits initial_x;  // empty = all zero
    std::uint64_t seed = 1;
    std::size_t avg_window = 5;
    unsigned threads = 0;
};

inline void validate(const NorRunConfig& c) {
    require(c.n >= 3, "NOR run: N must be >= 3");
    require(c.n <= 20, "NOR run: N must be <= 20");
    require(c.cycles >= 1, "NOR run: cycles must be >= 1");
    require(c.trials >= 1, "NOR run: trials must be >= 1");
    require(c.avg_window >= 1, "NOR run: averaging window must be >= 1");
    require(c.initial_x.empty() || c.initial_x.size() == c.n, "NOR run: initial state must have N bits");
}

struct NorStats {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t avg_window = 5;
    std::vector<Bits> solutions;
    std::vector<std::string> solution_labels;
    std::vector<std::vector<double>> x_ratio;         // [cycle][i]
    std::vector<std::vector<double>> solution_ratio;  // [cycle][solution]
    std::vector<std::vector<double>> x_window;        // [bucket][i]
    std::vector<std::vector<double>> solution_window; // [bucket][solution]

    std::size_t cycles() const { return x_ratio.size(); }

    /// Fraction of trials in any correct solution at 0-based cycle index k.
    double correct_ratio(std::size_t k) const {
        double s = 0.0;
        for (double r : solution_ratio[k]) s += r;
        return s;
    }

    double ratio_of(const std::string& label, std::size_t k) const {
        for (std::size_t s = 0; s < solution_labels.size(); ++s)
            if (solution_labels[s] == label) return solution_ratio[k][s];
        throw InvalidArgument("no correct solution labelled '" + label + "'");
    }

    /// Windowed average column i at the bucket containing cycle index k.
    std::size_t bucket(std::size_t k) const { return k / avg_window; }
};

namespace detail {

inline std::vector<std::vector<double>> window_average(const std::vector<std::vector<double>>& series,
                                                       std::size_t window) {
    std::vector<std::vector<double>> out;
    for (std::size_t start = 0; start < series.size(); start += window) {
        const std::size_t end = std::min(series.size(), start + window);
        std::vector<double> avg(series[start].size(), 0.0);
        for (std::size_t k = start; k < end; ++k)
            for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += series[k][i];
        for (double& a : avg) a /= static_cast<double>(end - start);
        out.push_back(std::move(avg));
    }
    return out;
}

}  // namespace detail

/// Runs `trials` independent chains; trial i draws from its own stream
/// derive_seed(seed, i), so results do not depend on the thread count.
template <class Profile>
NorStats run_nor(const NorRunConfig& config, const Profile& profile) {
    validate(config);
    require(profile.size() == config.n, "run_nor: profile has " + std::to_string(profile.size()) + " dots, N is " +
                                            std::to_string(config.n));
    const Bits start = config.initial_x.empty() ? Bits(config.n, 0) : config.initial_x;

    std::vector<std::vector<PatternMask>> paths(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t trial) {
        Rng rng(derive_seed(config.seed, trial));
        auto state = initial_state(start);
        auto& path = paths[trial];
        path.reserve(config.cycles);
        for (std::size_t c = 0; c < config.cycles; ++c) {
            state = nor_step(state, profile, rng);
            path.push_back(to_mask(state.x));
        }
    });

    NorStats stats;
    stats.n = config.n;
    stats.trials = config.trials;
    stats.avg_window = config.avg_window;
    stats.solutions = correct_solutions(config.n);
    std::vector<PatternMask> solution_masks;
    for (const auto& s : stats.solutions) {
        stats.solution_labels.push_back(solution_label(s));
        solution_masks.push_back(to_mask(s));
    }
    const double trials = static_cast<double>(config.trials);
    for (std::size_t c = 0; c < config.cycles; ++c) {
        std::vector<std::size_t> ones(config.n, 0), hits(solution_masks.size(), 0);
        for (const auto& path : paths) {
            const PatternMask m = path[c];
            for (std::size_t i = 0; i < config.n; ++i) ones[i] += (m >> i) & 1u;
            for (std::size_t s = 0; s < solution_masks.size(); ++s) hits[s] += m == solution_masks[s];
        }
        std::vector<double> xr(config.n), sr(solution_masks.size());
        for (std::size_t i = 0; i < config.n; ++i) xr[i] = static_cast<double>(ones[i]) / trials;
        for (std::size_t s = 0; s < sr.size(); ++s) sr[s] = static_cast<double>(hits[s]) / trials;
        stats.x_ratio.push_back(std::move(xr));
        stats.solution_ratio.push_back(std::move(sr));
    }
    stats.x_window = detail::window_average(stats.x_ratio, config.avg_window);
    stats.solution_window = detail::window_average(stats.solution_ratio, config.avg_window);
    return stats;
}

/// One row per cycle (1-based). avg_* columns hold the average over the
/// row's window of `avg_window` cycles.
inline std::string nor_stats_csv(const NorStats& stats) {
    std::string out = "cycle";
    for (std::size_t i = 0; i < stats.n; ++i) out += ",ratio_x" + std::to_string(i + 1);
    for (const auto& l : stats.solution_labels) out += ",ratio_" + l;
    out += ",ratio_correct";
    for (std::size_t i = 0; i < stats.n; ++i) out += ",avg_x" + std::to_string(i + 1);
    for (const auto& l : stats.solution_labels) out += ",avg_" + l;
    out += "\n";
    for (std::size_t k = 0; k < stats.cycles(); ++k) {
        out += std::to_string(k + 1);
        for (double r : stats.x_ratio[k]) out += "," + format_number(r);
        for (double r : stats.solution_ratio[k]) out += "," + format_number(r);
        out += "," + format_number(stats.correct_ratio(k));
        const std::size_t b = stats.bucket(k);
        for (double r : stats.x_window[b]) out += "," + format_number(r);
        for (double r : stats.solution_window[b]) out += "," + format_number(r);
        out += "\n";
    }
    return out;
}

inline nlohmann::json nor_stats_json(const NorStats& stats) {
    nlohmann::json j;
    j["n"] = stats.n;
    j["trials"] = stats.trials;
    j["cycles"] = stats.cycles();
    j["avg_window"] = stats.avg_window;
    std::vector<std::string> sols;
    for (const auto& s : stats.solutions) sols.push_back(bit_string(s));
    j["correct_solutions"] = sols;
    j["solution_labels"] = stats.solution_labels;
    j["x_ratio"] = stats.x_ratio;
    j["solution_ratio"] = stats.solution_ratio;
    j["x_window"] = stats.x_window;
    j["solution_window"] = stats.solution_window;
    std::vector<double> correct;
    for (std::size_t k = 0; k < stats.cycles(); ++k) correct.push_back(stats.correct_ratio(k));
    j["correct_ratio"] = correct;
    return j;
}

}  // namespace qdnet::nor
