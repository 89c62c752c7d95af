#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdnet/core/error.hpp"
#include "qdnet/core/format.hpp"
#include "qdnet/core/parallel.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/qd/evolve.hpp"
#include "qdnet/qd/network.hpp"

namespace qdnet::bandit {

inline constexpr int kMinJ = -100;
inline constexpr int kMaxJ = 100;

/// Relaxation rates (1/ps) of LL_2 -> LL_1 and LR_2 -> LR_1 at IA position j:
///   Gamma_LL2 = 1/100 + j/10000 + 1/100000
///   Gamma_LR2 = 1/100 - j/10000 + 1/100000
/// Evaluated as integer numerators over 100000, so j = 0 gives exactly 0.01001.
struct GammaPair {
    double ll2;
    double lr2;
};

inline GammaPair gamma_of_j(int j) {
    if (j < kMinJ || j > kMaxJ) throw InvalidArgument("IA position " + std::to_string(j) + " outside [-100, 100]");
    return {static_cast<double>(1000 + 10 * j + 1) / 100000.0, static_cast<double>(1000 - 10 * j + 1) / 100000.0};
}

struct NanoDmParams {
    double coupling_time_ps = 100.0;    // every near-field coupling
    double m_relaxation_time_ps = 10.0; // M_U -> M_1
    double m_lifetime_ns = 1.0;         // radiation from M_1
    double l_lifetime_ns = 1.0;         // radiation from L_1
    double source_lifetime_ns = 2.92;
    bool couple_l3 = false;             // wire L_3: M_U <-> L_3 coupling, L_3 -> L_2 relaxation
};

/// The 5-dot chain LL - ML - S - MR - LR with 11 levels:
///   S <-> M_U (coupling), M_U -> M_1 (Gamma_M), M_1 <-> L_2 (coupling),
///   L_2 -> L_1 (Gamma(j)); M_1 and L_1 radiate. L_3 is inert unless
///   couple_l3 is set.
inline qd::QdNetwork nanodm_network(int j, const NanoDmParams& params = {}) {
    using qd::LevelKind;
    require(params.coupling_time_ps > 0 && params.m_relaxation_time_ps > 0 && params.m_lifetime_ns > 0 &&
                params.l_lifetime_ns > 0 && params.source_lifetime_ns > 0,
            "NanoDM: times and lifetimes must be > 0");
    const auto g = gamma_of_j(j);
    const double u = 1.0 / params.coupling_time_ps;
    const double gm = 1.0 / params.m_relaxation_time_ps;
    qd::QdNetwork net;
    net.levels = {
        {"S", "S", LevelKind::source, 1.0 / params.source_lifetime_ns},
        {"ML_U", "ML", LevelKind::upper, 0.0},
        {"ML_1", "ML", LevelKind::upper, 1.0 / params.m_lifetime_ns},
        {"MR_U", "MR", LevelKind::upper, 0.0},
        {"MR_1", "MR", LevelKind::upper, 1.0 / params.m_lifetime_ns},
        {"LL_3", "LL", LevelKind::upper, 0.0},
        {"LL_2", "LL", LevelKind::upper, 0.0},
        {"LL_1", "LL", LevelKind::lower, 1.0 / params.l_lifetime_ns},
        {"LR_3", "LR", LevelKind::upper, 0.0},
        {"LR_2", "LR", LevelKind::upper, 0.0},
        {"LR_1", "LR", LevelKind::lower, 1.0 / params.l_lifetime_ns},
    };
    net.couplings = {{"S", "ML_U", u}, {"S", "MR_U", u}, {"ML_1", "LL_2", u}, {"MR_1", "LR_2", u}};
    net.relaxations = {{"ML_U", "ML_1", gm, 0.0}, {"MR_U", "MR_1", gm, 0.0}, {"LL_2", "LL_1", g.ll2, 0.0},
                       {"LR_2", "LR_1", g.lr2, 0.0}};
    if (params.couple_l3) {
        net.couplings.push_back({"ML_U", "LL_3", u});
        net.couplings.push_back({"MR_U", "LR_3", u});
        net.relaxations.push_back({"LL_3", "LL_2", gm, 0.0});
        net.relaxations.push_back({"LR_3", "LR_2", gm, 0.0});
    }
    qd::validate(net);
    return net;
}

struct Selection {
    double s_a = 0.0;  // photon yield of ML_1
    double s_b = 0.0;  // photon yield of MR_1
};

struct NanoDmModel {
    NanoDmParams params;
    qd::IntegratorConfig integrator;
    std::vector<Selection> table;  // index j + 100

    const Selection& at(int j) const {
        require(j >= kMinJ && j <= kMaxJ, "IA position outside [-100, 100]");
        return table[static_cast<std::size_t>(j - kMinJ)];
    }

    /// P(select A) = S_A / (S_A + S_B).
    double prob_a(int j) const {
        const auto& s = at(j);
        return s.s_a / (s.s_a + s.s_b);
    }
};

inline Selection solve_selection(int j, const NanoDmParams& params, const qd::IntegratorConfig& integrator) {
    const auto traj = qd::evolve(nanodm_network(j, params), {}, integrator);
    return {traj.final_yield("ML_1"), traj.final_yield("MR_1")};
}

/// Solves the master equation at every integer j in [-100, 100].
inline NanoDmModel build_nanodm(const NanoDmParams& params = {}, const qd::IntegratorConfig& integrator = {},
                                unsigned threads = 0) {
    NanoDmModel model{params, integrator, std::vector<Selection>(kMaxJ - kMinJ + 1)};
    qd::validate(integrator);
    parallel_for(model.table.size(), threads, [&](std::size_t k) {
        model.table[k] = solve_selection(static_cast<int>(k) + kMinJ, params, integrator);
    });
    for (int j = kMinJ; j <= kMaxJ; ++j) {
        const auto& s = model.at(j);
        if (!(s.s_a + s.s_b > 0.0)) throw Error("NanoDM: no radiation from the middle dots at j=" + std::to_string(j));
    }
    return model;
}

enum class Machine { A, B };

inline Machine select_machine(const NanoDmModel& model, int j, Rng& rng) {
    return rng.uniform() < model.prob_a(j) ? Machine::A : Machine::B;
}

struct IaState {
    int j = 0;
    int d = 50;
};

/// Reward moves the IA toward the chosen machine (A: j - D, B: j + D), no
/// reward moves it away; the result is clamped to [-100, 100].
inline IaState ia_update(IaState s, Machine selected, bool rewarded) {
    require(s.d >= 1, "IA increment D must be >= 1");
    const bool left = (selected == Machine::A) == rewarded;
    s.j = std::clamp(left ? s.j - s.d : s.j + s.d, kMinJ, kMaxJ);
    return s;
}

struct SlotMachines {
    double p_a = 0.2;
    double p_b = 0.8;

    bool has_correct() const { return p_a != p_b; }
    Machine correct() const { return p_a > p_b ? Machine::A : Machine::B; }
    double reward_prob(Machine m) const { return m == Machine::A ? p_a : p_b; }
};

inline void validate(const SlotMachines& m) {
    require(m.p_a >= 0.0 && m.p_a <= 1.0 && m.p_b >= 0.0 && m.p_b <= 1.0, "reward probabilities must lie in [0,1]");
}

/// Per-play averages over samples. `correct_rate[t]` is the fraction of
/// samples choosing the better machine at play t+1, `cumulative_rate[t]`
/// the mean over samples of (correct choices in plays 1..t+1)/(t+1). With
/// equal reward probabilities both are NaN. `final_half` holds, per sample,
/// the average of its cumulative rate over the last half of the plays.
struct RunStats {
    std::size_t plays = 0;
    std::size_t samples = 0;
    std::vector<double> select_b_rate;
    std::vector<double> correct_rate;
    std::vector<double> cumulative_rate;
    std::vector<double> final_half;

    double final_cumulative() const { return cumulative_rate.back(); }
};

namespace detail {

/// Reduces per-sample selection histories (1 = chose B) into RunStats.
inline RunStats summarize(const std::vector<std::vector<std::uint8_t>>& chose_b, const SlotMachines& machines) {
    RunStats st;
    st.samples = chose_b.size();
    st.plays = chose_b.front().size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(st.samples);
    st.select_b_rate.assign(st.plays, 0.0);
    st.correct_rate.assign(st.plays, machines.has_correct() ? 0.0 : nan);
    st.cumulative_rate.assign(st.plays, machines.has_correct() ? 0.0 : nan);
    const std::uint8_t good = machines.correct() == Machine::B ? 1 : 0;
    const std::size_t half_start = st.plays / 2;
    for (const auto& h : chose_b) {
        std::size_t correct = 0;
        double half_sum = 0.0;
        for (std::size_t t = 0; t < st.plays; ++t) {
            st.select_b_rate[t] += h[t];
            if (!machines.has_correct()) continue;
            correct += h[t] == good;
            st.correct_rate[t] += h[t] == good;
            const double cum = static_cast<double>(correct) / static_cast<double>(t + 1);
            st.cumulative_rate[t] += cum;
            if (t >= half_start) half_sum += cum;
        }
        st.final_half.push_back(machines.has_correct() ? half_sum / static_cast<double>(st.plays - half_start) : nan);
    }
    for (std::size_t t = 0; t < st.plays; ++t) {
        st.select_b_rate[t] /= n;
        st.correct_rate[t] /= n;
        st.cumulative_rate[t] /= n;
    }
    return st;
}

}  // namespace detail

/// `samples` independent episodes of the IA loop, each from j = 0. Sample s
/// draws from derive_seed(seed, s): per play one draw for the selection and
/// one for the reward.
inline RunStats play_nanodm(const NanoDmModel& model, const SlotMachines& machines, std::size_t plays,
                            std::size_t samples, int d, std::uint64_t seed, unsigned threads = 0) {
    validate(machines);
    require(plays >= 1 && samples >= 1, "plays and samples must be >= 1");
    require(d >= 1, "IA increment D must be >= 1");
    std::vector<std::vector<std::uint8_t>> chose_b(samples, std::vector<std::uint8_t>(plays));
    parallel_for(samples, threads, [&](std::size_t s) {
        Rng rng(derive_seed(seed, s));
        IaState ia{0, d};
        for (std::size_t t = 0; t < plays; ++t) {
            const Machine m = select_machine(model, ia.j, rng);
            const bool reward = rng.uniform() < machines.reward_prob(m);
            chose_b[s][t] = m == Machine::B;
            ia = ia_update(ia, m, reward);
        }
    });
    return detail::summarize(chose_b, machines);
}

inline std::string selection_table_csv(const NanoDmModel& model) {
    std::string out = "j,S_A,S_B,S_B_minus_S_A\n";
    for (int j = kMinJ; j <= kMaxJ; ++j) {
        const auto& s = model.at(j);
        out += std::to_string(j) + "," + format_number(s.s_a) + "," + format_number(s.s_b) + "," +
               format_number(s.s_b - s.s_a) + "\n";
    }
    return out;
}

inline nlohmann::json selection_table_json(const NanoDmModel& model) {
    nlohmann::json j = nlohmann::json::array();
    for (int k = kMinJ; k <= kMaxJ; ++k) {
        const auto& s = model.at(k);
        j.push_back({{"j", k}, {"S_A", s.s_a}, {"S_B", s.s_b}, {"S_B_minus_S_A", s.s_b - s.s_a}});
    }
    return j;
}

}  // namespace qdnet::bandit
