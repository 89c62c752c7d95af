#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qdnet/bandit/nanodm.hpp"
#include "qdnet/core/error.hpp"
#include "qdnet/core/format.hpp"
#include "qdnet/core/parallel.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/core/stats.hpp"

namespace qdnet::bandit {

/// Softmax over running per-arm reward means; Q starts at 0.
class SoftmaxAgent {
public:
    explicit SoftmaxAgent(double beta) : beta_(beta) { require(beta >= 0.0 && std::isfinite(beta), "softmax beta must be finite and >= 0"); }

    /// exp(b Q_A) / (exp(b Q_A) + exp(b Q_B)), written in the overflow-safe form.
    double prob_a() const { return 1.0 / (1.0 + std::exp(beta_ * (q_[1] - q_[0]))); }

    Machine select(Rng& rng) const { return rng.uniform() < prob_a() ? Machine::A : Machine::B; }

    void update(Machine m, bool rewarded) {
        const std::size_t k = m == Machine::A ? 0 : 1;
        ++count_[k];
        q_[k] += ((rewarded ? 1.0 : 0.0) - q_[k]) / static_cast<double>(count_[k]);
    }

    double q(Machine m) const { return q_[m == Machine::A ? 0 : 1]; }
    std::size_t count(Machine m) const { return count_[m == Machine::A ? 0 : 1]; }
    double beta() const { return beta_; }

private:
    double beta_;
    double q_[2] = {0.0, 0.0};
    std::size_t count_[2] = {0, 0};
};

/// Same seeding scheme as play_nanodm: sample s uses derive_seed(seed, s),
/// one draw for the selection and one for the reward per play.
inline RunStats play_softmax(double beta, const SlotMachines& machines, std::size_t plays, std::size_t samples,
                             std::uint64_t seed, unsigned threads = 0) {
    validate(machines);
    require(plays >= 1 && samples >= 1, "plays and samples must be >= 1");
    SoftmaxAgent proto(beta);
    std::vector<std::vector<std::uint8_t>> chose_b(samples, std::vector<std::uint8_t>(plays));
    parallel_for(samples, threads, [&](std::size_t s) {
        Rng rng(derive_seed(seed, s));
        SoftmaxAgent agent = proto;
        for (std::size_t t = 0; t < plays; ++t) {
            const Machine m = agent.select(rng);
            const bool reward = rng.uniform() < machines.reward_prob(m);
            chose_b[s][t] = m == Machine::B;
            agent.update(m, reward);
        }
    });
    return detail::summarize(chose_b, machines);
}

inline const std::vector<double>& default_beta_grid() {
    static const std::vector<double> grid{0.5, 1, 2, 5, 10, 20, 50};
    return grid;
}

/// Seed of the held-out runs used to pick beta, distinct from any seed the
/// evaluation uses for the same master seed.
inline std::uint64_t tuning_seed(std::uint64_t seed) { return derive_seed(seed, 0x7u) ^ 0x5eedbe7aULL; }

struct BetaChoice {
    double beta = 0.0;
    std::vector<double> scores;  // final cumulative rate per grid entry
};

/// Grid entry with the highest final cumulative correct rate on `seed`
/// (first one on ties).
inline BetaChoice optimize_beta(const SlotMachines& machines, std::size_t plays, std::size_t samples,
                                const std::vector<double>& grid, std::uint64_t seed, unsigned threads = 0) {
    require(!grid.empty(), "beta grid is empty");
    require(machines.has_correct(), "beta search needs machines with different reward probabilities");
    BetaChoice choice;
    double best = -1.0;
    for (double b : grid) {
        const double score = play_softmax(b, machines, plays, samples, seed, threads).final_cumulative();
        choice.scores.push_back(score);
        if (score > best) {
            best = score;
            choice.beta = b;
        }
    }
    return choice;
}

struct Comparison {
    SlotMachines machines;
    int d = 50;
    BetaChoice beta;
    RunStats nanodm;
    RunStats softmax;
};

struct CompareConfig {
    std::vector<SlotMachines> machines{{0.2, 0.8}, {0.4, 0.6}};
    std::size_t plays = 1000;
    std::size_t samples = 1000;
    int d = 50;
    std::vector<double> beta_grid = default_beta_grid();
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// NanoDM against Softmax with beta tuned on held-out seeds, per setting.
inline std::vector<Comparison> compare(const NanoDmModel& model, const CompareConfig& config) {
    std::vector<Comparison> out;
    for (const auto& m : config.machines) {
        Comparison c;
        c.machines = m;
        c.d = config.d;
        c.beta = optimize_beta(m, config.plays, config.samples, config.beta_grid, tuning_seed(config.seed),
                               config.threads);
        c.nanodm = play_nanodm(model, m, config.plays, config.samples, config.d, config.seed, config.threads);
        c.softmax = play_softmax(c.beta.beta, m, config.plays, config.samples, config.seed, config.threads);
        out.push_back(std::move(c));
    }
    return out;
}

/// Mean and standard error of the per-sample final-half averages.
struct FinalHalf {
    double mean;
    double sem;
};

inline FinalHalf final_half_summary(const RunStats& s) {
    const double m = stats::mean(s.final_half);
    const double sem = s.final_half.size() > 1 ? std::sqrt(stats::variance(s.final_half) / static_cast<double>(s.final_half.size())) : 0.0;
    return {m, sem};
}

inline std::string efficiency_csv(const Comparison& c) {
    std::string out = "play,nanodm_rate,softmax_rate\n";
    for (std::size_t t = 0; t < c.nanodm.plays; ++t)
        out += std::to_string(t + 1) + "," + format_number(c.nanodm.cumulative_rate[t]) + "," +
               format_number(c.softmax.cumulative_rate[t]) + "\n";
    return out;
}

inline std::string run_stats_csv(const RunStats& s) {
    std::string out = "play,cumulative_rate,correct_rate,select_b_rate\n";
    for (std::size_t t = 0; t < s.plays; ++t)
        out += std::to_string(t + 1) + "," + format_number(s.cumulative_rate[t]) + "," +
               format_number(s.correct_rate[t]) + "," + format_number(s.select_b_rate[t]) + "\n";
    return out;
}

}  // namespace qdnet::bandit
