#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdnet/core/error.hpp"
#include "qdnet/core/format.hpp"
#include "qdnet/core/parallel.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/core/stats.hpp"
#include "qdnet/sat/cnf.hpp"
#include "qdnet/sat/nanops.hpp"
#include "qdnet/sat/rules.hpp"
#include "qdnet/sat/walksat.hpp"

namespace qdnet::sat {

enum class Solver { nanops, walksat };

inline std::string to_string(Solver s) { return s == Solver::nanops ? "nanops" : "walksat"; }

inline Solver parse_solver(const std::string& name) {
    if (name == "nanops") return Solver::nanops;
    if (name == "walksat") return Solver::walksat;
    throw InvalidArgument("unknown solver '" + name + "' (expected nanops or walksat)");
}

struct BenchmarkConfig {
    std::size_t trials = 100;
    std::uint64_t max_steps = 1'000'000;
    NanoPsConfig nanops;  // p settings; its seed and budget are ignored here
    std::vector<Solver> solvers{Solver::nanops, Solver::walksat};
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Statistics of one (instance, solver) pair. mean/median/sem cover solved
/// trials only; `timeouts` > 0 flags that the mean excludes censored runs.
struct BenchmarkRow {
    std::string instance;
    std::size_t instance_index = 0;
    Solver solver = Solver::nanops;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double mean_steps = std::numeric_limits<double>::quiet_NaN();
    double median_steps = std::numeric_limits<double>::quiet_NaN();
    double sem_steps = std::numeric_limits<double>::quiet_NaN();
    std::size_t walksat_order = 0;  // 1 = easiest for WalkSAT; 0 when WalkSAT was not run

    double success_rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
    std::size_t timeouts() const { return trials - successes; }
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;  // instance-major, solvers in config order

    const BenchmarkRow& row(std::size_t instance, Solver s) const {
        for (const auto& r : rows)
            if (r.instance_index == instance && r.solver == s) return r;
        throw InvalidArgument("benchmark has no row for that instance/solver");
    }

    std::size_t instances() const {
        std::size_t n = 0;
        for (const auto& r : rows) n = std::max(n, r.instance_index + 1);
        return n;
    }

    /// WalkSAT mean / NanoPS mean per instance.
    std::vector<double> advantage_ratios() const {
        std::vector<double> out;
        for (std::size_t k = 0; k < instances(); ++k)
            out.push_back(row(k, Solver::walksat).mean_steps / row(k, Solver::nanops).mean_steps);
        return out;
    }

    /// Fraction of instances where the NanoPS mean is below the WalkSAT mean.
    double nanops_win_fraction() const {
        std::size_t wins = 0;
        for (std::size_t k = 0; k < instances(); ++k)
            wins += row(k, Solver::nanops).mean_steps < row(k, Solver::walksat).mean_steps;
        return static_cast<double>(wins) / static_cast<double>(instances());
    }
};

/// Seed of trial `trial` of `solver` on instance `instance`.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t instance, Solver solver, std::size_t trial) {
    return derive_seed(derive_seed(derive_seed(master, instance), static_cast<std::uint64_t>(solver)), trial);
}

inline BenchmarkResult benchmark(const std::vector<NamedFormula>& instances, const BenchmarkConfig& config) {
    require(!instances.empty(), "benchmark needs at least one instance");
    require(config.trials >= 1, "benchmark needs at least one trial");
    require(!config.solvers.empty(), "benchmark needs at least one solver");
    std::vector<RuleSet> rules;
    std::vector<std::vector<double>> probs;
    for (const auto& inst : instances) {
        rules.push_back(compile_rules(inst.formula));
        probs.push_back(resolve_probabilities(config.nanops, inst.formula.num_vars));
    }

    const std::size_t ns = config.solvers.size();
    const std::size_t items = instances.size() * ns * config.trials;
    std::vector<SolveResult> results(items);
    // NanoPS trials run in bit-parallel batches, WalkSAT trials one by one.
    struct Job {
        std::size_t first;  // index into results
        std::size_t count;
    };
    std::vector<Job> jobs;
    for (std::size_t k = 0; k < instances.size(); ++k)
        for (std::size_t s = 0; s < ns; ++s) {
            const std::size_t base = (k * ns + s) * config.trials;
            const std::size_t width = config.solvers[s] == Solver::nanops ? NanoPsBatch::kLanes : 1;
            for (std::size_t t = 0; t < config.trials; t += width)
                jobs.push_back({base + t, std::min(width, config.trials - t)});
        }
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const Job job = jobs[j];
        const std::size_t trial = job.first % config.trials;
        const std::size_t s = (job.first / config.trials) % ns;
        const std::size_t k = job.first / (config.trials * ns);
        const Solver solver = config.solvers[s];
        const auto& f = instances[k].formula;
        if (solver == Solver::nanops) {
            std::vector<Rng> rngs;
            for (std::size_t t = 0; t < job.count; ++t) rngs.emplace_back(trial_seed(config.seed, k, solver, trial + t));
            auto batch = NanoPsBatch(f, rules[k], probs[k]).solve(rngs, config.max_steps);
            for (std::size_t t = 0; t < job.count; ++t) {
                batch[t].assignment.clear();
                results[job.first + t] = std::move(batch[t]);
            }
        } else {
            Rng rng(trial_seed(config.seed, k, solver, trial));
            auto r = walksat_solve(f, config.max_steps, rng);
            r.assignment.clear();
            results[job.first] = std::move(r);
        }
    });

    BenchmarkResult out;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        for (std::size_t s = 0; s < ns; ++s) {
            BenchmarkRow row;
            row.instance = instances[k].name;
            row.instance_index = k;
            row.solver = config.solvers[s];
            row.trials = config.trials;
            std::vector<double> steps;
            for (std::size_t t = 0; t < config.trials; ++t) {
                const auto& r = results[(k * ns + s) * config.trials + t];
                if (r.solved) steps.push_back(static_cast<double>(r.steps));
            }
            row.successes = steps.size();
            if (!steps.empty()) {
                row.mean_steps = stats::mean(steps);
                row.median_steps = stats::median(steps);
                row.sem_steps = steps.size() > 1 ? std::sqrt(stats::variance(steps) / static_cast<double>(steps.size())) : 0.0;
            }
            out.rows.push_back(std::move(row));
        }
    }

    if (std::find(config.solvers.begin(), config.solvers.end(), Solver::walksat) != config.solvers.end()) {
        std::vector<std::size_t> order(instances.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        auto key = [&](std::size_t k) {
            const double m = out.row(k, Solver::walksat).mean_steps;
            return std::isnan(m) ? std::numeric_limits<double>::infinity() : m;
        };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
        for (std::size_t rank = 0; rank < order.size(); ++rank)
            for (auto& r : out.rows)
                if (r.instance_index == order[rank]) r.walksat_order = rank + 1;
    }
    return out;
}

inline std::string benchmark_csv(const BenchmarkResult& result) {
    std::string out = "instance,solver,mean_steps,median_steps,success_rate,trials,timeouts,sem_steps,walksat_order\n";
    for (const auto& r : result.rows) {
        out += r.instance + "," + to_string(r.solver) + "," + format_number(r.mean_steps) + "," +
               format_number(r.median_steps) + "," + format_number(r.success_rate()) + "," + std::to_string(r.trials) +
               "," + std::to_string(r.timeouts()) + "," + format_number(r.sem_steps) + "," +
               std::to_string(r.walksat_order) + "\n";
    }
    return out;
}

inline nlohmann::json benchmark_json(const BenchmarkResult& result) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
    for (const auto& r : result.rows) {
        j["rows"].push_back({{"instance", r.instance},
                             {"solver", to_string(r.solver)},
                             {"mean_steps", num(r.mean_steps)},
                             {"median_steps", num(r.median_steps)},
                             {"success_rate", r.success_rate()},
                             {"trials", r.trials},
                             {"timeouts", r.timeouts()},
                             {"mean_excludes_timeouts", r.timeouts() > 0},
                             {"sem_steps", num(r.sem_steps)},
                             {"walksat_order", r.walksat_order}});
    }
    return j;
}

}  // namespace qdnet::sat
