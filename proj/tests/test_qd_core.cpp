#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracle/liouvillian_oracle.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/core/stats.hpp"
#include "qdnet/qd/config_file.hpp"
#include "qdnet/qd/evolve.hpp"
#include "qdnet/qd/export.hpp"
#include "qdnet/qd/network.hpp"
#include "qdnet/qd/profile.hpp"

using namespace qdnet;
using namespace qdnet::qd;

namespace {

// Photon yields of the 4-dot star at t = 10 ns (default rates), from an
// exact matrix exponential of the dense Lindbladian computed offline with
// scipy.linalg.expm. Index = dot L1..L4.
constexpr double kOpenYield = 0.243913713562702;
constexpr double kOpenYield20ns = 0.243925743770052;
constexpr double kOneBlockedSelf = 0.0760319350898196;
constexpr double kOneBlockedOther = 0.297994321412299;
constexpr double kThreeBlockedClosed = 0.068028790562727;
constexpr double kThreeBlockedOpen = 0.723182604245641;
constexpr double kAllBlocked = 0.185513116167394;
constexpr double kSourceYieldOpen = 0.0242970227350099;

ControlPattern blocked(std::initializer_list<int> dots) {
    ControlPattern c;
    for (int d : dots) c.blocked.insert(lower_level_name(static_cast<std::size_t>(d - 1)));
    return c;
}

std::vector<double> dot_yields(const Trajectory& t, std::size_t dots = 4) {
    std::vector<double> y;
    for (std::size_t i = 0; i < dots; ++i) y.push_back(t.final_yield(lower_level_name(i)));
    return y;
}

const QdNetwork& star() {
    static const QdNetwork net = build_standard_network(4);
    return net;
}

}  // namespace

TEST(StandardNetwork, FourDotsHasNineLevels) {
    const auto& net = star();
    EXPECT_EQ(net.levels.size(), 9u);
    EXPECT_EQ(net.couplings.size(), 4u);
    EXPECT_EQ(net.relaxations.size(), 4u);
    EXPECT_EQ(net.destination_dots(), (std::vector<std::string>{"L1", "L2", "L3", "L4"}));
}

TEST(StandardNetwork, MinimalAndEmpty) {
    const auto net = build_standard_network(1);
    EXPECT_EQ(net.levels.size(), 3u);
    EXPECT_EQ(net.couplings.size(), 1u);
    EXPECT_EQ(net.relaxations.size(), 1u);
    EXPECT_THROW(build_standard_network(0), InvalidArgument);
}

TEST(StandardNetwork, TypicalParameterSet) {
    const auto& net = star();
    EXPECT_DOUBLE_EQ(net.level("S").radiative_rate_per_ns, 1.0 / 2.92);
    EXPECT_DOUBLE_EQ(net.level("L1_L").radiative_rate_per_ns, 1.0);
    EXPECT_DOUBLE_EQ(net.couplings[0].strength, 0.01);
    EXPECT_DOUBLE_EQ(net.relaxations[0].rate, 0.1);
    EXPECT_DOUBLE_EQ(net.relaxations[0].blocked_rate, 0.001);
}

TEST(NetworkValidation, RejectsBrokenNetworks) {
    auto net = build_standard_network(2);
    auto dup = net;
    dup.levels.push_back(dup.levels[1]);
    EXPECT_THROW(validate(dup), InvalidArgument);

    auto two_sources = net;
    two_sources.levels[1].kind = LevelKind::source;
    EXPECT_THROW(validate(two_sources), InvalidArgument);

    auto to_lower = net;
    to_lower.couplings.push_back({"S", "L1_L", 0.01});
    EXPECT_THROW(validate(to_lower), InvalidArgument);

    auto bad_rates = net;
    bad_rates.relaxations[0].blocked_rate = bad_rates.relaxations[0].rate;
    EXPECT_THROW(validate(bad_rates), InvalidArgument);

    auto cross_dot = net;
    cross_dot.relaxations[0].to = "L2_L";
    EXPECT_THROW(validate(cross_dot), InvalidArgument);

    auto unreachable = net;
    unreachable.couplings.erase(unreachable.couplings.begin());
    EXPECT_THROW(validate(unreachable), InvalidArgument);

    auto negative = net;
    negative.levels[0].radiative_rate_per_ns = -1;
    EXPECT_THROW(validate(negative), InvalidArgument);
}

TEST(Evolve, OpenNetworkIsFullySymmetric) {
    IntegratorConfig cfg;
    cfg.horizon_ps = 20000;
    const auto t = evolve(star(), {}, cfg);
    const auto y = dot_yields(t);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(y[i], y[j], 1e-9);
    EXPECT_NEAR(y[0], kOpenYield20ns, 1e-7);
}

TEST(Evolve, AccountingIdentityHoldsAtEverySample) {
    IntegratorConfig cfg;
    cfg.horizon_ps = 20000;
    const auto t = evolve(star(), {}, cfg);
    for (std::size_t k = 0; k < t.samples(); ++k) EXPECT_NEAR(t.emitted(k) + t.residual(k), 1.0, 1e-6);
    EXPECT_NEAR(t.emitted(t.samples() - 1) + t.residual(t.samples() - 1), 1.0, 1e-6);
    EXPECT_DOUBLE_EQ(t.times.back(), 20000.0);
}

TEST(Evolve, MatchesFrozenExactYields) {
    const auto open = dot_yields(evolve(star(), {}));
    for (double y : open) EXPECT_NEAR(y, kOpenYield, 1e-7);
    EXPECT_NEAR(evolve(star(), {}).final_yield("S"), kSourceYieldOpen, 1e-7);

    const auto one = dot_yields(evolve(star(), blocked({1})));
    EXPECT_NEAR(one[0], kOneBlockedSelf, 1e-7);
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(one[i], kOneBlockedOther, 1e-7);

    const auto three = dot_yields(evolve(star(), blocked({1, 2, 3})));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(three[i], kThreeBlockedClosed, 1e-7);
    EXPECT_NEAR(three[3], kThreeBlockedOpen, 1e-7);

    for (double y : dot_yields(evolve(star(), blocked({1, 2, 3, 4})))) EXPECT_NEAR(y, kAllBlocked, 1e-7);
}

TEST(Evolve, AgreesWithDenseLindbladOracle) {
    for (const auto& pattern : {ControlPattern{}, blocked({2}), blocked({1, 3}), blocked({2, 3, 4})}) {
        const auto exact = oracle::exact_yields(star(), pattern, 10000.0);
        const auto t = evolve(star(), pattern);
        for (const auto& [id, y] : exact) EXPECT_NEAR(t.final_yield(id), y, 1e-7) << id;
    }
}

TEST(Evolve, OracleAgreesWithFrozenValues) {
    const auto exact = oracle::exact_yields(star(), blocked({1}), 10000.0);
    EXPECT_NEAR(exact.at("L1_L"), kOneBlockedSelf, 1e-10);
    EXPECT_NEAR(exact.at("L2_L"), kOneBlockedOther, 1e-10);
}

TEST(Evolve, BlockedDotFallsBelowOpenDotByReferenceFactor) {
    IntegratorConfig fine;
    fine.dt_ps = 0.01;
    const auto y = dot_yields(evolve(star(), blocked({1}), fine));
    EXPECT_LT(y[0], y[1]);
    EXPECT_NEAR(y[0] / y[1], kOneBlockedSelf / kOneBlockedOther, 1e-9);
}

TEST(Evolve, DensityMatrixStaysHermitianAndTraceDrains) {
    const auto t = evolve(star(), blocked({2, 4}));
    EXPECT_LE(t.max_hermiticity_error, 1e-12);
    for (std::size_t k = 1; k < t.samples(); ++k) EXPECT_LE(t.coherent_trace(k), t.coherent_trace(k - 1) + 1e-15);
    for (const auto& series : t.coherent_populations)
        for (double p : series) EXPECT_TRUE(p >= -1e-12 && p <= 1.0 + 1e-6);
    for (const auto& series : t.lower_populations)
        for (double p : series) EXPECT_TRUE(p >= -1e-12 && p <= 1.0 + 1e-6);
}

TEST(Evolve, RelabellingIdenticalDotsPermutesYieldsBitwise) {
    const auto base = dot_yields(evolve(star(), blocked({1})));
    const auto moved = dot_yields(evolve(star(), blocked({3})));
    EXPECT_EQ(base[0], moved[2]);
    EXPECT_EQ(base[2], moved[0]);
    EXPECT_EQ(base[1], moved[1]);
    EXPECT_EQ(base[3], moved[3]);

    const auto pair = dot_yields(evolve(star(), blocked({1, 2})));
    const auto pair2 = dot_yields(evolve(star(), blocked({3, 4})));
    EXPECT_EQ(pair[0], pair2[2]);
    EXPECT_EQ(pair[1], pair2[3]);
    EXPECT_EQ(pair[2], pair2[0]);
}

// Adding a dot to the blocked set never raises that dot's yield and never
// lowers the yield of a dot that stays open. (Already-blocked dots can
// lose yield: they share the slow coherent exchange with the newcomer.)
TEST(Evolve, BlockingMonotonicityOnStar) {
    const auto profile = full_transfer_profile(star(), 1.0);
    for (const auto& [mask, before] : profile.yields) {
        for (std::size_t i = 0; i < 4; ++i) {
            if (mask & (PatternMask{1} << i)) continue;
            const auto& after = profile.yields.at(mask | (PatternMask{1} << i));
            EXPECT_LE(after[i], before[i]) << "mask " << mask << " dot " << i;
            for (std::size_t k = 0; k < 4; ++k)
                if (k != i && !(mask & (PatternMask{1} << k))) {
                    EXPECT_GE(after[k], before[k]) << "mask " << mask << " add " << i << " dot " << k;
                }
        }
    }
}

// Checked at 1 ns: once the network has drained, fixed-step RK4 reproduces
// the branching ratios of a linear system exactly and the differences sink
// to rounding level.
TEST(Evolve, SecondOrderGridConvergence) {
    std::vector<std::vector<double>> runs;
    for (double dt : {2.0, 1.0, 0.5}) {
        IntegratorConfig cfg;
        cfg.dt_ps = dt;
        cfg.horizon_ps = 1000.0;
        runs.push_back(dot_yields(evolve(star(), blocked({1, 3}), cfg)));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        const double first = std::abs(runs[0][i] - runs[1][i]);
        const double second = std::abs(runs[1][i] - runs[2][i]);
        EXPECT_LT(second, first / 4.0) << "dot " << i;
    }
}

TEST(Evolve, DriftBeyondToleranceAborts) {
    IntegratorConfig cfg;
    cfg.dt_ps = 5.0;
    cfg.horizon_ps = 1000.0;
    cfg.conservation_tolerance = 1e-30;
    EXPECT_THROW(evolve(star(), {}, cfg), ConservationError);
}

TEST(Evolve, RejectsInvalidInputs) {
    IntegratorConfig short_horizon;
    short_horizon.horizon_ps = 5.0;
    EXPECT_THROW(evolve(star(), {}, short_horizon), InvalidArgument);
    ControlPattern bad;
    bad.blocked.insert("L1_U");
    EXPECT_THROW(evolve(star(), bad), InvalidArgument);
    ControlPattern unknown;
    unknown.blocked.insert("nope");
    EXPECT_THROW(evolve(star(), unknown), InvalidArgument);
}

TEST(TransferProfile, OpenPatternGivesEqualProbabilities) {
    const std::vector<ControlPattern> patterns{ControlPattern{}};
    const auto p = transfer_profile(star(), patterns, 1.0);
    const auto& probs = p.probabilities(0);
    for (double v : probs) EXPECT_DOUBLE_EQ(v, probs[0]);
    EXPECT_NEAR(probs[0], kOpenYield, 1e-7);
}

TEST(TransferProfile, SingleOpenDotDominates) {
    const std::vector<ControlPattern> patterns{blocked({1, 2, 3}), blocked({1, 2, 3, 4})};
    const auto p = transfer_profile(star(), patterns, 1.0);
    const auto& three = p.probabilities(0b0111);
    EXPECT_NEAR(three[3], kThreeBlockedOpen, 1e-7);
    EXPECT_NEAR(three[0], kThreeBlockedClosed, 1e-7);
    EXPECT_GT(three[3], 10.0 * three[0]);
    EXPECT_DOUBLE_EQ(three[0], three[1]);
    EXPECT_DOUBLE_EQ(three[1], three[2]);
    for (double v : p.probabilities(0b1111)) EXPECT_GT(v, 0.0);
}

TEST(TransferProfile, GainScalesAndClamps) {
    const auto p1 = full_transfer_profile(star(), 1.0);
    const auto p2 = full_transfer_profile(star(), 2.0);
    EXPECT_EQ(p1.entries.size(), 16u);
    for (const auto& [mask, probs] : p1.entries)
        for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(p2.entries.at(mask)[i], std::min(1.0, 2.0 * probs[i]));
    const std::vector<ControlPattern> patterns{blocked({1, 2, 3})};
    EXPECT_EQ(transfer_profile(star(), patterns, 5.0).probabilities(0b0111)[3], 1.0);
    EXPECT_THROW(transfer_profile(star(), patterns, 0.0), InvalidArgument);
}

TEST(TransferProfile, LazyProfileMatchesPrecomputed) {
    const auto full = full_transfer_profile(star(), 1.5);
    LazyTransferProfile lazy(star(), 1.5);
    EXPECT_EQ(lazy.probabilities(0b0101), full.probabilities(0b0101));
    EXPECT_EQ(lazy.probabilities(0b0101), full.probabilities(0b0101));
    EXPECT_EQ(lazy.cached(), 1u);
}

TEST(TransferProfile, MaskRoundTrip) {
    const auto dests = star().destination_dots();
    for (PatternMask m = 0; m < 16; ++m) EXPECT_EQ(pattern_mask(star(), dests, control_pattern(star(), dests, m)), m);
}

TEST(SampleRadiation, DegenerateProbabilities) {
    Rng rng(1);
    const std::vector<double> ones(4, 1.0), zeros(4, 0.0);
    for (int k = 0; k < 100; ++k) {
        EXPECT_EQ(sample_radiation(ones, rng), (std::vector<std::uint8_t>{1, 1, 1, 1}));
        EXPECT_EQ(sample_radiation(zeros, rng), (std::vector<std::uint8_t>{0, 0, 0, 0}));
    }
}

TEST(SampleRadiation, FrequenciesMatchProbabilities) {
    const std::vector<double> p{0.9, 0.1, 0.1, 0.9};
    const auto profile = constant_profile(p);
    Rng rng(20240611);
    const int draws = 100000;
    std::vector<double> hits(4, 0.0);
    for (int k = 0; k < draws; ++k) {
        const auto bits = sample_radiation(profile, 0b0110, rng);
        for (std::size_t i = 0; i < 4; ++i) hits[i] += bits[i];
    }
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(hits[i] / draws, p[i], 3.0 * stats::binomial_sigma(p[i], draws)) << i;
}

TEST(SampleRadiation, DeterministicAndChecksPattern) {
    const auto profile = full_transfer_profile(star(), 1.0);
    Rng a(7), b(7);
    for (int k = 0; k < 50; ++k) EXPECT_EQ(sample_radiation(profile, 5, a), sample_radiation(profile, 5, b));
    TransferProfile partial;
    partial.destinations = {"L1"};
    partial.set(0, {0.5});
    EXPECT_THROW(sample_radiation(partial, 1, a), InvalidArgument);
    Rng c(3);
    EXPECT_EQ(sample_radiation(profile, star(), blocked({1}), c).size(), 4u);
}

TEST(NetworkConfig, StandardWithOverrides) {
    const auto s = parse_network_config(
        "# star network\n[network]\nstandard_dots = 3\nblocked_factor = 50\n[integrator]\ndt_ps = 0.2\n"
        "horizon_ps = 5000\ngain = 1.5\n");
    EXPECT_EQ(s.network.levels.size(), 7u);
    EXPECT_DOUBLE_EQ(s.network.relaxations[0].blocked_rate, 0.1 / 50);
    EXPECT_DOUBLE_EQ(s.integrator.dt_ps, 0.2);
    EXPECT_DOUBLE_EQ(s.integrator.horizon_ps, 5000);
    EXPECT_DOUBLE_EQ(s.gain, 1.5);
}

TEST(NetworkConfig, ExplicitNetwork) {
    const auto s = parse_network_config(
        "level = S S source 0.5\nlevel = A_U A upper 0\nlevel = A_L A lower 1\n"
        "coupling = S A_U 0.01\nrelaxation = A_U A_L 0.1 0.001\n");
    EXPECT_EQ(s.network.levels.size(), 3u);
    EXPECT_EQ(s.network.destination_dots(), std::vector<std::string>{"A"});
    const auto t = evolve(s.network, {});
    EXPECT_GT(t.final_yield("A_L"), 0.5);
}

TEST(NetworkConfig, ErrorsCarryLineNumbers) {
    try {
        parse_network_config("dt_ps = 0.1\nwat = 3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_network_config("dt_ps = fast\n"), ParseError);
    EXPECT_THROW(parse_network_config("level = S S source\n"), ParseError);
    EXPECT_THROW(parse_network_config("dt_ps\n"), ParseError);
    EXPECT_THROW(parse_network_config("dt_ps = 1\nhorizon_ps = 10\n"), InvalidArgument);
}

TEST(Export, TrajectoryAndProfileTables) {
    IntegratorConfig cfg;
    cfg.horizon_ps = 1000;
    cfg.sample_interval_ps = 100;
    const auto t = evolve(star(), {}, cfg);
    const auto csv = trajectory_csv(t);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "time_ps,S,L1_U,L2_U,L3_U,L4_U,L1_L,L2_L,L3_L,L4_L");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
    EXPECT_EQ(trajectory_json(t)["time_ps"].size(), 11u);

    const auto profile = full_transfer_profile(star(), 1.0);
    const auto pcsv = profile_csv(profile);
    EXPECT_EQ(std::count(pcsv.begin(), pcsv.end(), '\n'), 17);
    EXPECT_EQ(profile_json(profile)["patterns"].size(), 16u);
    EXPECT_EQ(mask_string(0b0101, 4), "1010");
}
