#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracle/liouvillian_oracle.hpp"
#include "qdnet/bandit/nanodm.hpp"
#include "qdnet/bandit/softmax.hpp"
#include "qdnet/core/stats.hpp"

using namespace qdnet;
using namespace qdnet::bandit;

namespace {

// Photon yields of ML_1 / MR_1 from the dense expm oracle, 10 ns horizon.
constexpr double kSymmetricYield = 0.0540067537442882;   // j = 0, both sides
constexpr double kFarYieldA = 0.0444248638183256;        // j = 100, ML_1
constexpr double kFarYieldB = 0.469836817393288;         // j = 100, MR_1

const NanoDmModel& model() {
    static const NanoDmModel m = build_nanodm();
    return m;
}

NanoDmModel flat_model(Selection s) {
    NanoDmModel m;
    m.table.assign(kMaxJ - kMinJ + 1, s);
    return m;
}

double three_sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

// First play (1-based) at which the curve reaches `level`, or plays + 1.
std::size_t first_reach(const RunStats& s, double level) {
    for (std::size_t t = 0; t < s.plays; ++t)
        if (s.cumulative_rate[t] >= level) return t + 1;
    return s.plays + 1;
}

}  // namespace

TEST(Gamma, ExactValues) {
    EXPECT_EQ(gamma_of_j(0).ll2, 0.01001);
    EXPECT_EQ(gamma_of_j(0).lr2, 0.01001);
    EXPECT_EQ(gamma_of_j(100).lr2, 0.00001);
    EXPECT_EQ(gamma_of_j(100).ll2, 0.02001);
    EXPECT_EQ(gamma_of_j(-100).ll2, 0.00001);
    EXPECT_EQ(gamma_of_j(-100).lr2, 0.02001);
}

TEST(Gamma, PositiveAndMirroredOverTheGrid) {
    for (int j = kMinJ; j <= kMaxJ; ++j) {
        EXPECT_GT(gamma_of_j(j).ll2, 0.0);
        EXPECT_GT(gamma_of_j(j).lr2, 0.0);
        EXPECT_EQ(gamma_of_j(j).ll2, gamma_of_j(-j).lr2);
    }
}

TEST(Gamma, OutOfRangeThrows) {
    EXPECT_THROW(gamma_of_j(101), InvalidArgument);
    EXPECT_THROW(gamma_of_j(-101), InvalidArgument);
}

TEST(Network, ElevenLevelsFourCouplingsFourRelaxations) {
    const auto net = nanodm_network(0);
    EXPECT_EQ(net.levels.size(), 11u);
    EXPECT_EQ(net.couplings.size(), 4u);
    EXPECT_EQ(net.relaxations.size(), 4u);
    NanoDmParams wired;
    wired.couple_l3 = true;
    const auto w = nanodm_network(0, wired);
    EXPECT_EQ(w.levels.size(), 11u);
    EXPECT_EQ(w.couplings.size(), 6u);
}

TEST(Table, OracleAgreesWithFrozenValues) {
    const auto mid = oracle::exact_yields(nanodm_network(0), {}, 10000.0);
    EXPECT_NEAR(mid.at("ML_1"), kSymmetricYield, 1e-10);
    EXPECT_NEAR(mid.at("MR_1"), kSymmetricYield, 1e-10);
    const auto far = oracle::exact_yields(nanodm_network(100), {}, 10000.0);
    EXPECT_NEAR(far.at("ML_1"), kFarYieldA, 1e-10);
    EXPECT_NEAR(far.at("MR_1"), kFarYieldB, 1e-10);
}

TEST(Table, MatchesOracle) {
    EXPECT_NEAR(model().at(0).s_a, kSymmetricYield, 1e-7);
    EXPECT_NEAR(model().at(100).s_a, kFarYieldA, 1e-7);
    EXPECT_NEAR(model().at(100).s_b, kFarYieldB, 1e-7);
    for (int j : {-63, 17, 42}) {
        const auto exact = oracle::exact_yields(nanodm_network(j), {}, 10000.0);
        EXPECT_NEAR(model().at(j).s_a, exact.at("ML_1"), 1e-7) << j;
        EXPECT_NEAR(model().at(j).s_b, exact.at("MR_1"), 1e-7) << j;
    }
}

TEST(Table, MirrorSymmetryIsExact) {
    for (int j = kMinJ; j <= kMaxJ; ++j) {
        EXPECT_EQ(model().at(j).s_a, model().at(-j).s_b) << j;
        EXPECT_GT(model().at(j).s_a + model().at(j).s_b, 0.0) << j;
    }
    EXPECT_EQ(model().at(0).s_a, model().at(0).s_b);
    EXPECT_EQ(model().prob_a(0), 0.5);
}

TEST(Table, DifferenceIsMonotoneAndCrossesZeroAtOrigin) {
    for (int j = kMinJ; j < kMaxJ; ++j) {
        const double here = model().at(j).s_b - model().at(j).s_a;
        const double next = model().at(j + 1).s_b - model().at(j + 1).s_a;
        EXPECT_LE(here, next) << j;
    }
    EXPECT_LT(model().at(-1).s_b - model().at(-1).s_a, 0.0);
    EXPECT_EQ(model().at(0).s_b - model().at(0).s_a, 0.0);
    EXPECT_GT(model().at(1).s_b - model().at(1).s_a, 0.0);
}

TEST(Table, RecomputationIsBitwiseIdentical) {
    const auto again = build_nanodm({}, {}, 1);
    for (int j = kMinJ; j <= kMaxJ; ++j) {
        EXPECT_EQ(again.at(j).s_a, model().at(j).s_a);
        EXPECT_EQ(again.at(j).s_b, model().at(j).s_b);
    }
}

TEST(Table, OutOfGridLookupThrows) {
    EXPECT_THROW(model().at(101), Error);
}

TEST(Select, EmpiricalRateAtFarRightMatchesTable) {
    Rng rng(2024);
    const int draws = 100000;
    int b = 0;
    for (int i = 0; i < draws; ++i) b += select_machine(model(), 100, rng) == Machine::B;
    const double p = 1.0 - model().prob_a(100);
    EXPECT_NEAR(b / static_cast<double>(draws), p, three_sigma(p, draws));
}

TEST(Select, ZeroLeftYieldAlwaysPicksB) {
    const auto m = flat_model({0.0, 0.3});
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) ASSERT_EQ(select_machine(m, 0, rng), Machine::B);
}

TEST(Ia, MovesAndClamps) {
    EXPECT_EQ(ia_update({0, 50}, Machine::A, true).j, -50);
    EXPECT_EQ(ia_update({0, 50}, Machine::A, false).j, 50);
    EXPECT_EQ(ia_update({0, 50}, Machine::B, true).j, 50);
    EXPECT_EQ(ia_update({0, 50}, Machine::B, false).j, -50);
    EXPECT_EQ(ia_update({-100, 50}, Machine::A, true).j, -100);
    EXPECT_EQ(ia_update({90, 50}, Machine::B, true).j, 100);
    EXPECT_EQ(ia_update({7, 3}, Machine::A, false).j, 10);
    EXPECT_THROW(ia_update({0, 0}, Machine::A, true), Error);
}

TEST(Ia, StaysInRangeAlongRandomTrajectories) {
    Rng rng(99);
    for (int d : {1, 7, 50, 100, 250}) {
        IaState s{0, d};
        for (int t = 0; t < 5000; ++t) {
            s = ia_update(s, rng.uniform() < 0.5 ? Machine::A : Machine::B, rng.uniform() < 0.5);
            ASSERT_GE(s.j, kMinJ);
            ASSERT_LE(s.j, kMaxJ);
        }
    }
}

TEST(Machines, CorrectArmAndValidation) {
    EXPECT_EQ((SlotMachines{0.2, 0.8}.correct()), Machine::B);
    EXPECT_EQ((SlotMachines{0.7, 0.3}.correct()), Machine::A);
    EXPECT_FALSE((SlotMachines{0.5, 0.5}.has_correct()));
    EXPECT_THROW(validate(SlotMachines{-0.1, 0.5}), Error);
    EXPECT_THROW(validate(SlotMachines{0.5, 1.5}), Error);
}

TEST(NanoDm, EqualMachinesSelectEachArmHalfTheTime) {
    const std::size_t samples = 2000;
    const auto s = play_nanodm(model(), {0.5, 0.5}, 200, samples, 50, 11);
    double late = 0.0;
    for (std::size_t t = 100; t < 200; ++t) late += s.select_b_rate[t];
    late /= 100.0;
    // Plays within one sample are correlated; 3 sigma of one play is the looser bound.
    EXPECT_NEAR(late, 0.5, three_sigma(0.5, samples));
    EXPECT_TRUE(std::isnan(s.cumulative_rate.back()));
}

TEST(NanoDm, SinglePlayIsACoinFlip) {
    const std::size_t samples = 10000;
    const auto s = play_nanodm(model(), {0.2, 0.8}, 1, samples, 50, 3);
    ASSERT_EQ(s.cumulative_rate.size(), 1u);
    EXPECT_EQ(s.cumulative_rate[0], s.correct_rate[0]);
    EXPECT_NEAR(s.cumulative_rate[0], 0.5, three_sigma(0.5, samples));
}

TEST(NanoDm, RatesStayInUnitInterval) {
    const auto s = play_nanodm(model(), {0.2, 0.8}, 300, 200, 50, 8);
    for (std::size_t t = 0; t < s.plays; ++t) {
        EXPECT_GE(s.cumulative_rate[t], 0.0);
        EXPECT_LE(s.cumulative_rate[t], 1.0);
    }
}

TEST(NanoDm, LearnsTheBetterMachine) {
    const auto s = play_nanodm(model(), {0.2, 0.8}, 1000, 1000, 50, 1);
    EXPECT_GT(s.cumulative_rate.back(), 0.75);
    EXPECT_GT(s.correct_rate.back(), s.correct_rate.front());
}

TEST(NanoDm, CloserMachinesAreHarder) {
    const auto easy = play_nanodm(model(), {0.2, 0.8}, 1000, 1000, 50, 1);
    const auto hard = play_nanodm(model(), {0.4, 0.6}, 1000, 1000, 50, 1);
    for (double level : {0.55, 0.6, 0.65, 0.7, 0.75, 0.8}) {
        ASSERT_LE(first_reach(easy, level), easy.plays) << level;
        EXPECT_GT(first_reach(hard, level), first_reach(easy, level)) << level;
    }
}

TEST(NanoDm, SameSeedSameCurves) {
    const auto a = play_nanodm(model(), {0.4, 0.6}, 500, 300, 50, 77, 1);
    const auto b = play_nanodm(model(), {0.4, 0.6}, 500, 300, 50, 77, 4);
    EXPECT_EQ(a.cumulative_rate, b.cumulative_rate);
    EXPECT_EQ(a.select_b_rate, b.select_b_rate);
    EXPECT_EQ(a.final_half, b.final_half);
}

TEST(NanoDm, EpisodesAreExchangeable) {
    const auto s = play_nanodm(model(), {0.4, 0.6}, 400, 2000, 50, 123);
    std::vector<double> shuffled = s.final_half;
    Rng rng(4);
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    auto split_gap = [](const std::vector<double>& xs) {
        const std::size_t h = xs.size() / 2;
        const std::vector<double> a(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(h));
        const std::vector<double> b(xs.begin() + static_cast<std::ptrdiff_t>(h), xs.end());
        const double se = std::sqrt(stats::variance(a) / static_cast<double>(a.size()) + stats::variance(b) / static_cast<double>(b.size()));
        return std::abs(stats::mean(a) - stats::mean(b)) / se;
    };
    EXPECT_LE(split_gap(s.final_half), 3.0);
    EXPECT_LE(split_gap(shuffled), 3.0);
}

TEST(NanoDm, RejectsBadArguments) {
    EXPECT_THROW(play_nanodm(model(), {0.2, 0.8}, 0, 10, 50, 1), Error);
    EXPECT_THROW(play_nanodm(model(), {0.2, 0.8}, 10, 0, 50, 1), Error);
    EXPECT_THROW(play_nanodm(model(), {0.2, 0.8}, 10, 10, 0, 1), Error);
}

TEST(Softmax, ProbabilityFollowsEstimates) {
    SoftmaxAgent agent(2.0);
    EXPECT_EQ(agent.prob_a(), 0.5);
    agent.update(Machine::B, true);
    agent.update(Machine::B, false);
    agent.update(Machine::A, false);
    EXPECT_EQ(agent.q(Machine::B), 0.5);
    EXPECT_EQ(agent.q(Machine::A), 0.0);
    EXPECT_EQ(agent.count(Machine::B), 2u);
    EXPECT_NEAR(agent.prob_a(), std::exp(0.0) / (std::exp(0.0) + std::exp(1.0)), 1e-15);
    EXPECT_THROW(SoftmaxAgent(-1.0), Error);
}

TEST(Softmax, ZeroBetaIsUniform) {
    const std::size_t samples = 4000;
    const auto s = play_softmax(0.0, {0.2, 0.8}, 100, samples, 6);
    EXPECT_NEAR(s.correct_rate.back(), 0.5, three_sigma(0.5, samples));
    EXPECT_NEAR(s.cumulative_rate.back(), 0.5, three_sigma(0.5, samples));
}

TEST(Softmax, LargeBetaPicksTheBetterEstimate) {
    SoftmaxAgent agent(1e4);
    agent.update(Machine::A, false);
    agent.update(Machine::B, true);
    EXPECT_LT(agent.prob_a(), 1e-12);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(agent.select(rng), Machine::B);
}

TEST(Softmax, GridSearchPicksTheBestScore) {
    const auto choice = optimize_beta({0.2, 0.8}, 300, 300, default_beta_grid(), tuning_seed(1));
    ASSERT_EQ(choice.scores.size(), default_beta_grid().size());
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < choice.scores.size(); ++i)
        if (choice.scores[i] > best) {
            best = choice.scores[i];
            best_i = i;
        }
    EXPECT_EQ(choice.beta, default_beta_grid()[best_i]);
    EXPECT_NE(tuning_seed(1), 1u);
    EXPECT_THROW(optimize_beta({0.5, 0.5}, 10, 10, default_beta_grid(), 1), Error);
}

TEST(Compare, SameSeedSameCurves) {
    CompareConfig c;
    c.plays = 200;
    c.samples = 100;
    const auto a = compare(model(), c);
    const auto b = compare(model(), c);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].beta.beta, b[i].beta.beta);
        EXPECT_EQ(a[i].nanodm.cumulative_rate, b[i].nanodm.cumulative_rate);
        EXPECT_EQ(a[i].softmax.cumulative_rate, b[i].softmax.cumulative_rate);
    }
    const auto csv = efficiency_csv(a[0]);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
    EXPECT_EQ(csv.rfind("play,nanodm_rate,softmax_rate\n", 0), 0u);
}

TEST(Export, SelectionTableHasOneRowPerPosition) {
    const auto csv = selection_table_csv(model());
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 202);
    EXPECT_EQ(csv.rfind("j,S_A,S_B,S_B_minus_S_A\n", 0), 0u);
    const auto js = selection_table_json(model());
    ASSERT_EQ(js.size(), 201u);
    EXPECT_EQ(js[100]["j"], 0);
    EXPECT_EQ(js[100]["S_B_minus_S_A"], 0.0);
}
