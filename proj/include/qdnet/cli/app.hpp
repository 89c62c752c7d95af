#pragma once

// Command-line front end. Needs CLI11.hpp on the include path.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qdnet/bandit/nanodm.hpp"
#include "qdnet/bandit/softmax.hpp"
#include "qdnet/core/error.hpp"
#include "qdnet/core/format.hpp"
#include "qdnet/nor/nor.hpp"
#include "qdnet/qd/config_file.hpp"
#include "qdnet/qd/evolve.hpp"
#include "qdnet/qd/export.hpp"
#include "qdnet/qd/network.hpp"
#include "qdnet/qd/profile.hpp"
#include "qdnet/sat/benchmark.hpp"
#include "qdnet/sat/cnf.hpp"
#include "qdnet/sat/nanops.hpp"
#include "qdnet/sat/walksat.hpp"

#ifndef QDNET_VERSION
#define QDNET_VERSION "unknown"
#endif

namespace qdnet::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kInput = 3,
    kUnsolved = 4,
    kNumerical = 5,
};

/// Flags shared by every experiment subcommand.
struct Common {
    std::string out = "results";
    std::uint64_t seed = 1;
    std::string format = "csv";
    unsigned threads = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Common, out, seed, format, threads)

/// Network and integrator flags used by profile, evolve and nor.
struct NetworkOptions {
    std::string network;  // key = value network file; empty = standard star network
    std::size_t dots = 4;
    double dt_ps = 0.1;
    double horizon_ps = 10000.0;
    double sample_interval_ps = 10.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NetworkOptions, network, dots, dt_ps, horizon_ps, sample_interval_ps)

struct ProfileOptions {
    Common common;
    NetworkOptions net;
    double gain = 1.0;
    std::vector<std::string> patterns;  // bit strings, '1' = blocked; empty = all 2^N
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProfileOptions, common, net, gain, patterns)

struct EvolveOptions {
    Common common;
    NetworkOptions net;
    std::vector<std::string> blocked;  // lower level ids
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvolveOptions, common, net, blocked)

struct NorOptions {
    Common common;
    NetworkOptions net;
    double gain = 1.0;
    std::size_t cycles = 30;
    std::size_t trials = 1000;
    std::string initial;  // bit string x1..xN, empty = all zero
    std::size_t window = 5;
    std::string profile = "master";  // master | deterministic
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NorOptions, common, net, gain, cycles, trials, initial, window, profile)

struct SolveOptions {
    Common common;
    std::string input;
    double p = 0.1;  // NanoPS transfer probability, every dot
    std::uint64_t max_steps = 1'000'000;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolveOptions, common, input, p, max_steps)

struct BanditOptions {
    Common common;
    double pa = 0.2;
    double pb = 0.8;
    int d = 50;
    std::size_t plays = 1000;
    std::size_t samples = 1000;
    std::vector<double> betas = bandit::default_beta_grid();
    double coupling_time_ps = 100.0;
    double m_relaxation_time_ps = 10.0;
    double m_lifetime_ns = 1.0;
    double l_lifetime_ns = 1.0;
    double source_lifetime_ns = 2.92;
    bool couple_l3 = false;
    double dt_ps = 0.1;
    double horizon_ps = 10000.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BanditOptions, common, pa, pb, d, plays, samples, betas, coupling_time_ps,
                                   m_relaxation_time_ps, m_lifetime_ns, l_lifetime_ns, source_lifetime_ns, couple_l3,
                                   dt_ps, horizon_ps)

struct BenchOptions {
    Common common;
    std::vector<std::string> instances;  // files or directories of *.cnf
    std::size_t trials = 100;
    std::uint64_t max_steps = 1'000'000;
    double p = 0.1;
    std::vector<std::string> solvers{"nanops", "walksat"};
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BenchOptions, common, instances, trials, max_steps, p, solvers)

namespace detail {

/// FNV-1a over file contents; recorded in the manifest so a replay can tell
/// that an input changed.
inline std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c; in.get(c);) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::ostringstream s;
    s << std::hex << h;
    return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// Collects the files a command writes and the inputs it read.
class Run {
public:
    Run(std::string subcommand, const Common& common) : subcommand_(std::move(subcommand)), common_(common) {
        require(common.format == "csv" || common.format == "json", "--format must be csv or json");
        std::filesystem::create_directories(common.out);
    }

    void input(const std::filesystem::path& path) {
        if (std::filesystem::is_directory(path)) {
            std::vector<std::filesystem::path> files;
            for (const auto& e : std::filesystem::directory_iterator(path))
                if (e.is_regular_file()) files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) inputs_[f.string()] = file_digest(f);
        } else {
            inputs_[path.string()] = file_digest(path);
        }
    }

    /// Writes `stem`.csv or `stem`.json depending on --format.
    void emit(const std::string& stem, const std::string& csv, const nlohmann::json& json) {
        const bool as_csv = common_.format == "csv";
        const std::string name = stem + (as_csv ? ".csv" : ".json");
        write_file(std::filesystem::path(common_.out) / name, as_csv ? csv : json_text(json));
        outputs_.push_back(name);
    }

    void manifest(const nlohmann::json& config) const {
        nlohmann::json m;
        m["tool"] = "qdnet";
        m["version"] = QDNET_VERSION;
        m["subcommand"] = subcommand_;
        m["seed"] = common_.seed;
        m["config"] = config;
        m["outputs"] = outputs_;
        m["inputs"] = inputs_;
        write_file(std::filesystem::path(common_.out) / "manifest.json", json_text(m));
    }

private:
    std::string subcommand_;
    Common common_;
    std::vector<std::string> outputs_;
    std::map<std::string, std::string> inputs_;
};

inline qd::NetworkSettings network_settings(const NetworkOptions& o) {
    qd::NetworkSettings s;
    if (!o.network.empty()) {
        s = qd::load_network_config(o.network);
    } else {
        s.network = qd::build_standard_network(o.dots);
    }
    s.integrator.dt_ps = o.dt_ps;
    s.integrator.horizon_ps = o.horizon_ps;
    s.integrator.sample_interval_ps = o.sample_interval_ps;
    qd::validate(s.integrator);
    return s;
}

inline qd::PatternMask parse_pattern(const std::string& bits, std::size_t dots) {
    require(bits.size() == dots, "pattern '" + bits + "' needs " + std::to_string(dots) + " bits");
    qd::PatternMask m = 0;
    for (std::size_t i = 0; i < dots; ++i) {
        require(bits[i] == '0' || bits[i] == '1', "pattern '" + bits + "' must contain only 0 and 1");
        if (bits[i] == '1') m |= qd::PatternMask{1} << i;
    }
    return m;
}

inline std::string assignment_string(const sat::Assignment& x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + std::to_string(x[i]);
    return s + ")";
}

}  // namespace detail

inline int cmd_profile(const ProfileOptions& o, std::ostream& log) {
    detail::Run run("profile", o.common);
    if (!o.net.network.empty()) run.input(o.net.network);
    const auto settings = detail::network_settings(o.net);
    const auto& net = settings.network;
    std::vector<qd::ControlPattern> patterns;
    if (o.patterns.empty()) {
        patterns = qd::all_patterns(net);
    } else {
        const auto dests = net.destination_dots();
        for (const auto& bits : o.patterns)
            patterns.push_back(qd::control_pattern(net, dests, detail::parse_pattern(bits, dests.size())));
    }
    const auto profile = qd::transfer_profile(net, patterns, o.gain, settings.integrator, o.common.threads);
    run.emit("profile", qd::profile_csv(profile), qd::profile_json(profile));
    run.manifest(o);
    log << "profile: " << profile.entries.size() << " patterns, gain " << format_number(o.gain) << "\n";
    return kOk;
}

inline int cmd_evolve(const EvolveOptions& o, std::ostream& log) {
    detail::Run run("evolve", o.common);
    if (!o.net.network.empty()) run.input(o.net.network);
    const auto settings = detail::network_settings(o.net);
    qd::ControlPattern control;
    control.blocked.insert(o.blocked.begin(), o.blocked.end());
    const auto traj = qd::evolve(settings.network, control, settings.integrator);
    run.emit("trajectory", qd::trajectory_csv(traj), qd::trajectory_json(traj));
    run.manifest(o);
    for (std::size_t i = 0; i < traj.radiative_levels.size(); ++i)
        log << "yield " << traj.radiative_levels[i] << " = " << format_number(traj.photon_yields[i].back()) << "\n";
    return kOk;
}

inline int cmd_nor(const NorOptions& o, std::ostream& log) {
    detail::Run run("nor", o.common);
    if (!o.net.network.empty()) run.input(o.net.network);
    nor::NorRunConfig c;
    c.n = o.net.dots;
    c.gain = o.gain;
    c.cycles = o.cycles;
    c.trials = o.trials;
    c.seed = o.common.seed;
    c.avg_window = o.window;
    c.threads = o.common.threads;
    if (!o.initial.empty()) c.initial_x = nor::parse_bits(o.initial);
    nor::NorStats stats;
    if (o.profile == "deterministic") {
        stats = nor::run_nor(c, qd::deterministic_profile(c.n));
    } else if (o.profile == "master") {
        const auto settings = detail::network_settings(o.net);
        const qd::LazyTransferProfile profile(settings.network, o.gain, settings.integrator);
        stats = nor::run_nor(c, profile);
    } else {
        throw InvalidArgument("--profile must be master or deterministic");
    }
    run.emit("nor", nor::nor_stats_csv(stats), nor::nor_stats_json(stats));
    run.manifest(o);
    const std::size_t last = stats.cycles() - 1;
    log << "correct-solution ratio at cycle " << stats.cycles() << ": " << format_number(stats.correct_ratio(last))
        << "\n";
    return kOk;
}

namespace detail {

inline int finish_solve(const std::string& solver, const SolveOptions& o, Run& run, const sat::SolveResult& r,
                        std::ostream& log) {
    const std::string name = std::filesystem::path(o.input).stem().string();
    std::string csv = "instance,solver,solved,steps,assignment\n";
    csv += name + "," + solver + "," + (r.solved ? "1" : "0") + "," + std::to_string(r.steps) + "," +
           (r.solved ? assignment_string(r.assignment) : "") + "\n";
    nlohmann::json j{{"instance", name}, {"solver", solver}, {"solved", r.solved}, {"steps", r.steps}};
    j["assignment"] = r.solved ? nlohmann::json(r.assignment) : nlohmann::json(nullptr);
    run.emit(solver, csv, j);
    run.manifest(o);
    if (!r.solved) {
        log << solver << ": no satisfying assignment within " << r.steps << " steps\n";
        return kUnsolved;
    }
    log << solver << ": solved in " << r.steps << " steps, x = " << assignment_string(r.assignment) << "\n";
    return kOk;
}

}  // namespace detail

inline int cmd_sat(const SolveOptions& o, std::ostream& log) {
    detail::Run run("sat", o.common);
    run.input(o.input);
    const auto f = sat::load_dimacs(o.input);
    sat::NanoPsConfig c;
    c.default_p = o.p;
    c.max_steps = o.max_steps;
    c.seed = o.common.seed;
    return detail::finish_solve("nanops", o, run, sat::nanops_solve(f, c), log);
}

inline int cmd_walksat(const SolveOptions& o, std::ostream& log) {
    detail::Run run("walksat", o.common);
    run.input(o.input);
    const auto f = sat::load_dimacs(o.input);
    sat::WalkSatConfig c;
    c.max_steps = o.max_steps;
    c.seed = o.common.seed;
    return detail::finish_solve("walksat", o, run, sat::walksat_solve(f, c), log);
}

inline int cmd_bandit(const BanditOptions& o, std::ostream& log) {
    detail::Run run("bandit", o.common);
    bandit::NanoDmParams params;
    params.coupling_time_ps = o.coupling_time_ps;
    params.m_relaxation_time_ps = o.m_relaxation_time_ps;
    params.m_lifetime_ns = o.m_lifetime_ns;
    params.l_lifetime_ns = o.l_lifetime_ns;
    params.source_lifetime_ns = o.source_lifetime_ns;
    params.couple_l3 = o.couple_l3;
    qd::IntegratorConfig integrator;
    integrator.dt_ps = o.dt_ps;
    integrator.horizon_ps = o.horizon_ps;
    const bandit::SlotMachines machines{o.pa, o.pb};
    bandit::validate(machines);
    require(machines.has_correct(), "bandit: --pa and --pb must differ");
    const auto model = bandit::build_nanodm(params, integrator, o.common.threads);

    bandit::CompareConfig c;
    c.machines = {machines};
    c.plays = o.plays;
    c.samples = o.samples;
    c.d = o.d;
    c.beta_grid = o.betas;
    c.seed = o.common.seed;
    c.threads = o.common.threads;
    const auto cmp = bandit::compare(model, c).front();

    nlohmann::json curves = nlohmann::json::array();
    for (std::size_t t = 0; t < cmp.nanodm.plays; ++t)
        curves.push_back({{"play", t + 1},
                          {"nanodm_rate", cmp.nanodm.cumulative_rate[t]},
                          {"softmax_rate", cmp.softmax.cumulative_rate[t]}});
    nlohmann::json eff{{"p_a", o.pa}, {"p_b", o.pb}, {"d", o.d}, {"softmax_beta", cmp.beta.beta},
                       {"beta_scores", cmp.beta.scores}, {"curves", curves}};
    run.emit("efficiency", bandit::efficiency_csv(cmp), eff);
    run.emit("selection_table", bandit::selection_table_csv(model), bandit::selection_table_json(model));
    run.manifest(o);
    log << "NanoDM final cumulative rate " << format_number(cmp.nanodm.final_cumulative()) << ", Softmax (beta "
        << format_number(cmp.beta.beta) << ") " << format_number(cmp.softmax.final_cumulative()) << "\n";
    return kOk;
}

inline int cmd_bench(const BenchOptions& o, std::ostream& log) {
    detail::Run run("bench", o.common);
    std::vector<sat::NamedFormula> instances;
    for (const auto& path : o.instances) {
        auto loaded = sat::load_instances(path);
        run.input(path);
        instances.insert(instances.end(), std::make_move_iterator(loaded.begin()), std::make_move_iterator(loaded.end()));
    }
    if (instances.empty()) throw IoError("bench: no .cnf instances found");
    sat::BenchmarkConfig c;
    c.trials = o.trials;
    c.max_steps = o.max_steps;
    c.nanops.default_p = o.p;
    c.solvers.clear();
    for (const auto& s : o.solvers) c.solvers.push_back(sat::parse_solver(s));
    c.seed = o.common.seed;
    c.threads = o.common.threads;
    const auto result = sat::benchmark(instances, c);
    run.emit("bench", sat::benchmark_csv(result), sat::benchmark_json(result));
    run.manifest(o);
    log << "bench: " << instances.size() << " instances x " << o.trials << " trials\n";
    return kOk;
}

namespace detail {

inline void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores); results do not depend on it");
}

inline void add_network(CLI::App* sub, NetworkOptions& n) {
    sub->add_option("--network", n.network, "Network file (key = value); default is the standard star network");
    sub->add_option("--dots", n.dots, "Large dots N of the standard network");
    sub->add_option("--dt", n.dt_ps, "RK4 step, ps");
    sub->add_option("--horizon", n.horizon_ps, "Integration horizon, ps");
    sub->add_option("--sample-interval", n.sample_interval_ps, "Trajectory sampling interval, ps");
}

inline void add_solve(CLI::App* sub, SolveOptions& o) {
    add_common(sub, o.common);
    sub->add_option("--input", o.input, "DIMACS CNF file")->required();
    sub->add_option("--max-steps", o.max_steps, "Step budget");
}

/// Re-runs the subcommand recorded in a manifest, writing to `out` when it
/// is not empty. Inputs must be unchanged.
inline int replay(const std::filesystem::path& manifest_path, const std::string& out, std::ostream& log) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest '" + manifest_path.string() + "'");
    nlohmann::json m;
    try {
        in >> m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("manifest is not valid JSON: ") + e.what());
    }
    for (const auto& [path, digest] : m.at("inputs").items())
        if (file_digest(path) != digest.get<std::string>())
            throw IoError("input '" + path + "' changed since the manifest was written");
    const std::string sub = m.at("subcommand").get<std::string>();
    auto cfg = m.at("config");
    if (!out.empty()) cfg["common"]["out"] = out;
    if (sub == "profile") return cmd_profile(cfg.get<ProfileOptions>(), log);
    if (sub == "evolve") return cmd_evolve(cfg.get<EvolveOptions>(), log);
    if (sub == "nor") return cmd_nor(cfg.get<NorOptions>(), log);
    if (sub == "sat") return cmd_sat(cfg.get<SolveOptions>(), log);
    if (sub == "walksat") return cmd_walksat(cfg.get<SolveOptions>(), log);
    if (sub == "bandit") return cmd_bandit(cfg.get<BanditOptions>(), log);
    if (sub == "bench") return cmd_bench(cfg.get<BenchOptions>(), log);
    throw InvalidArgument("manifest names unknown subcommand '" + sub + "'");
}

}  // namespace detail

/// Parses the command line and runs one subcommand. Results go to files;
/// `out` gets the summary line, `err` diagnostics.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Quantum-dot network simulator and stochastic solvers"};
    app.set_version_flag("--version", QDNET_VERSION);
    app.set_config("--config", "", "INI/TOML file mirroring the flags; one [section] per subcommand");
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    ProfileOptions profile;
    auto* p = app.add_subcommand("profile", "Transfer-probability table over control patterns");
    detail::add_common(p, profile.common);
    detail::add_network(p, profile.net);
    p->add_option("--gain", profile.gain, "Gain G: p = min(1, G * yield)");
    p->add_option("--patterns", profile.patterns, "Patterns to solve as bit strings, 1 = blocked (default: all)");

    EvolveOptions evolve;
    auto* e = app.add_subcommand("evolve", "Population trajectory for one control pattern");
    detail::add_common(e, evolve.common);
    detail::add_network(e, evolve.net);
    e->add_option("--block", evolve.blocked, "Lower levels filled by control light");

    NorOptions nor_opts;
    auto* n = app.add_subcommand("nor", "Ring-NOR constraint satisfaction with bounceback control");
    detail::add_common(n, nor_opts.common);
    detail::add_network(n, nor_opts.net);
    n->add_option("--gain", nor_opts.gain, "Gain G");
    n->add_option("--cycles", nor_opts.cycles, "Cycles per trial");
    n->add_option("--trials", nor_opts.trials, "Independent trials");
    n->add_option("--initial", nor_opts.initial, "Initial state x1..xN as bits (default all 0)");
    n->add_option("--window", nor_opts.window, "Averaging window, cycles");
    n->add_option("--profile", nor_opts.profile, "master: solve the network; deterministic: 0/1 state filling")
        ->check(CLI::IsMember({"master", "deterministic"}));

    SolveOptions sat_opts;
    auto* s = app.add_subcommand("sat", "Solve a DIMACS 3-SAT instance with NanoPS");
    detail::add_solve(s, sat_opts);
    s->add_option("--p", sat_opts.p, "Transfer probability of a stimulated dot");

    SolveOptions walk_opts;
    auto* w = app.add_subcommand("walksat", "Solve a DIMACS 3-SAT instance with WalkSAT");
    detail::add_solve(w, walk_opts);

    BanditOptions bandit_opts;
    auto* b = app.add_subcommand("bandit", "NanoDM against grid-tuned Softmax on two slot machines");
    detail::add_common(b, bandit_opts.common);
    b->add_option("--pa", bandit_opts.pa, "Reward probability of machine A");
    b->add_option("--pb", bandit_opts.pb, "Reward probability of machine B");
    b->add_option("--d", bandit_opts.d, "IA increment D");
    b->add_option("--plays", bandit_opts.plays, "Plays per sample");
    b->add_option("--samples", bandit_opts.samples, "Independent samples");
    b->add_option("--betas", bandit_opts.betas, "Softmax beta grid");
    b->add_option("--coupling-time", bandit_opts.coupling_time_ps, "Near-field coupling time, ps");
    b->add_option("--m-relaxation-time", bandit_opts.m_relaxation_time_ps, "M_U -> M_1 relaxation time, ps");
    b->add_option("--m-lifetime", bandit_opts.m_lifetime_ns, "Radiative lifetime of M_1, ns");
    b->add_option("--l-lifetime", bandit_opts.l_lifetime_ns, "Radiative lifetime of L_1, ns");
    b->add_option("--source-lifetime", bandit_opts.source_lifetime_ns, "Radiative lifetime of S, ns");
    b->add_flag("--couple-l3", bandit_opts.couple_l3, "Couple M_U to L_3 (L_3 relaxes to L_2)");
    b->add_option("--dt", bandit_opts.dt_ps, "RK4 step, ps");
    b->add_option("--horizon", bandit_opts.horizon_ps, "Integration horizon, ps");

    BenchOptions bench_opts;
    auto* k = app.add_subcommand("bench", "NanoPS against WalkSAT on a set of instances");
    detail::add_common(k, bench_opts.common);
    k->add_option("--instances", bench_opts.instances, "DIMACS files or directories of *.cnf")->required();
    k->add_option("--trials", bench_opts.trials, "Trials per instance and solver");
    k->add_option("--max-steps", bench_opts.max_steps, "Step budget per trial");
    k->add_option("--p", bench_opts.p, "NanoPS transfer probability");
    k->add_option("--solvers", bench_opts.solvers, "Solvers to run")->check(CLI::IsMember({"nanops", "walksat"}));

    std::string manifest, rerun_out;
    auto* r = app.add_subcommand("rerun", "Replay a manifest.json");
    r->add_option("--manifest", manifest, "Manifest written by an earlier run")->required();
    r->add_option("--out", rerun_out, "Output directory (default: the recorded one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (p->parsed()) return cmd_profile(profile, out);
        if (e->parsed()) return cmd_evolve(evolve, out);
        if (n->parsed()) return cmd_nor(nor_opts, out);
        if (s->parsed()) return cmd_sat(sat_opts, out);
        if (w->parsed()) return cmd_walksat(walk_opts, out);
        if (b->parsed()) return cmd_bandit(bandit_opts, out);
        if (k->parsed()) return cmd_bench(bench_opts, out);
        if (r->parsed()) return detail::replay(manifest, rerun_out, out);
    } catch (const ParseError& ex) {
        err << "error: " << ex.what() << "\n";
        return kInput;
    } catch (const IoError& ex) {
        err << "error: " << ex.what() << "\n";
        return kInput;
    } catch (const ConservationError& ex) {
        err << "numerical error: " << ex.what() << "\n";
        return kNumerical;
    } catch (const InvalidArgument& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsage;
    } catch (const std::filesystem::filesystem_error& ex) {
        err << "error: " << ex.what() << "\n";
        return kInput;
    } catch (const nlohmann::json::exception& ex) {
        err << "error: malformed manifest: " << ex.what() << "\n";
        return kInput;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kFailure;
    }
    return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<const char*> argv{"qdnet"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qdnet::cli
