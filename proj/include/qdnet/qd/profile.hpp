#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "qdnet/core/error.hpp"
#include "qdnet/core/parallel.hpp"
#include "qdnet/core/random.hpp"
#include "qdnet/qd/evolve.hpp"
#include "qdnet/qd/network.hpp"

namespace qdnet::qd {

/// Bit i set means destination dot i is state-filled.
using PatternMask = std::uint64_t;

/// Per-destination transfer probabilities for a set of control patterns.
///
/// p_i = clamp(gain * yield_i, 0, 1), where yield_i is the photon yield of
/// the radiative lower level(s) of destination dot i. The probabilities of
/// one pattern need not sum to one.
struct TransferProfile {
    double gain = 1.0;
    std::vector<std::string> destinations;
    std::map<PatternMask, std::vector<double>> yields;
    std::map<PatternMask, std::vector<double>> entries;

    std::size_t size() const { return destinations.size(); }

    bool contains(PatternMask mask) const { return entries.contains(mask); }

    const std::vector<double>& probabilities(PatternMask mask) const {
        auto it = entries.find(mask);
        if (it == entries.end())
            throw InvalidArgument("transfer profile has no entry for pattern mask " + std::to_string(mask));
        return it->second;
    }

    /// Sets the probabilities of `mask` directly, bypassing the yields.
    void set(PatternMask mask, std::vector<double> probs) {
        require(probs.size() == destinations.size(), "transfer profile: wrong probability count");
        for (double p : probs) require(p >= 0.0 && p <= 1.0, "transfer profile: probability outside [0,1]");
        entries[mask] = std::move(probs);
    }
};

inline double apply_gain(double gain, double yield) { return std::clamp(gain * yield, 0.0, 1.0); }

/// Mask of `control` relative to the destination dots of `net`. Every
/// blocked level must be a lower level of a destination, and a dot is
/// either fully blocked or not at all.
inline PatternMask pattern_mask(const QdNetwork& net, const std::vector<std::string>& destinations,
                                const ControlPattern& control) {
    validate(net, control);
    PatternMask mask = 0;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < destinations.size(); ++i) {
        const auto lowers = net.lower_levels_of(destinations[i]);
        const auto hit = static_cast<std::size_t>(std::count_if(
            lowers.begin(), lowers.end(), [&](const std::string& id) { return control.blocked.contains(id); }));
        require(hit == 0 || hit == lowers.size(),
                "control pattern partially blocks dot '" + destinations[i] + "'");
        if (hit > 0) mask |= PatternMask{1} << i;
        covered += hit;
    }
    require(covered == control.blocked.size(), "control pattern blocks a level outside the destinations");
    return mask;
}

inline ControlPattern control_pattern(const QdNetwork& net, const std::vector<std::string>& destinations,
                                      PatternMask mask) {
    ControlPattern control;
    for (std::size_t i = 0; i < destinations.size(); ++i)
        if (mask & (PatternMask{1} << i))
            for (auto& id : net.lower_levels_of(destinations[i])) control.blocked.insert(id);
    return control;
}

/// All 2^k patterns over the k destination dots, in mask order.
inline std::vector<ControlPattern> all_patterns(const QdNetwork& net) {
    const auto dests = net.destination_dots();
    require(dests.size() <= 20, "all_patterns: too many destination dots to enumerate");
    std::vector<ControlPattern> out;
    for (PatternMask m = 0; m < (PatternMask{1} << dests.size()); ++m)
        out.push_back(control_pattern(net, dests, m));
    return out;
}

/// Photon yield of each destination dot under `control`.
inline std::vector<double> destination_yields(const QdNetwork& net, const std::vector<std::string>& destinations,
                                              const ControlPattern& control, const IntegratorConfig& config) {
    const Trajectory traj = evolve(net, control, config);
    std::vector<double> out(destinations.size(), 0.0);
    for (std::size_t i = 0; i < destinations.size(); ++i)
        for (const auto& id : net.lower_levels_of(destinations[i]))
            if (net.level(id).radiative_rate_per_ns > 0.0) out[i] += traj.final_yield(id);
    return out;
}

/// Solves the master equation once per requested pattern. Patterns are
/// independent and may be spread over `threads` workers (0 = all cores).
inline TransferProfile transfer_profile(const QdNetwork& net, std::span<const ControlPattern> patterns,
                                        double gain, const IntegratorConfig& config = {}, unsigned threads = 1) {
    require(gain > 0.0, "transfer_profile: gain must be > 0");
    validate(net);
    TransferProfile profile;
    profile.gain = gain;
    profile.destinations = net.destination_dots();
    std::vector<PatternMask> masks;
    for (const auto& p : patterns) masks.push_back(pattern_mask(net, profile.destinations, p));
    std::vector<std::vector<double>> results(patterns.size());
    parallel_for(patterns.size(), threads, [&](std::size_t i) {
        results[i] = destination_yields(net, profile.destinations, patterns[i], config);
    });
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        std::vector<double> probs;
        for (double y : results[i]) probs.push_back(apply_gain(gain, y));
        profile.yields[masks[i]] = results[i];
        profile.entries[masks[i]] = std::move(probs);
    }
    return profile;
}

inline TransferProfile full_transfer_profile(const QdNetwork& net, double gain, const IntegratorConfig& config = {},
                                             unsigned threads = 1) {
    const auto patterns = all_patterns(net);
    return transfer_profile(net, patterns, gain, config, threads);
}

/// Profile with p = 0 for every blocked dot and p = 1 for every open one:
/// perfect state filling, no stochasticity.
inline TransferProfile deterministic_profile(std::size_t dots) {
    require(dots >= 1 && dots <= 20, "deterministic_profile: 1..20 dots");
    TransferProfile profile;
    for (std::size_t i = 0; i < dots; ++i) profile.destinations.push_back(large_dot_name(i));
    for (PatternMask m = 0; m < (PatternMask{1} << dots); ++m) {
        std::vector<double> probs(dots);
        for (std::size_t i = 0; i < dots; ++i) probs[i] = (m & (PatternMask{1} << i)) ? 0.0 : 1.0;
        profile.entries[m] = probs;
    }
    return profile;
}

/// Profile that assigns the same probabilities to every pattern.
inline TransferProfile constant_profile(std::span<const double> probs) {
    TransferProfile profile;
    for (std::size_t i = 0; i < probs.size(); ++i) profile.destinations.push_back(large_dot_name(i));
    for (PatternMask m = 0; m < (PatternMask{1} << probs.size()); ++m)
        profile.set(m, std::vector<double>(probs.begin(), probs.end()));
    return profile;
}

/// Computes pattern entries on first use and caches them. Thread-safe.
/// Used when 2^k is too large to precompute.
class LazyTransferProfile {
public:
    LazyTransferProfile(QdNetwork net, double gain, IntegratorConfig config = {})
        : net_(std::move(net)), config_(config), gain_(gain), destinations_(net_.destination_dots()) {
        require(gain > 0.0, "transfer_profile: gain must be > 0");
        validate(net_);
    }

    std::size_t size() const { return destinations_.size(); }
    double gain() const { return gain_; }

    std::vector<double> probabilities(PatternMask mask) const {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(mask); it != cache_.end()) return it->second;
        }
        auto yields = destination_yields(net_, destinations_, control_pattern(net_, destinations_, mask), config_);
        for (double& y : yields) y = apply_gain(gain_, y);
        std::lock_guard lock(mutex_);
        return cache_.emplace(mask, std::move(yields)).first->second;
    }

    std::size_t cached() const {
        std::lock_guard lock(mutex_);
        return cache_.size();
    }

private:
    QdNetwork net_;
    IntegratorConfig config_;
    double gain_;
    std::vector<std::string> destinations_;
    mutable std::mutex mutex_;
    mutable std::map<PatternMask, std::vector<double>> cache_;
};

/// One Bernoulli draw per destination dot, in ascending dot order.
inline std::vector<std::uint8_t> sample_radiation(std::span<const double> probabilities, Rng& rng) {
    std::vector<std::uint8_t> bits(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i) bits[i] = rng.uniform() < probabilities[i] ? 1 : 0;
    return bits;
}

inline std::vector<std::uint8_t> sample_radiation(const TransferProfile& profile, PatternMask mask, Rng& rng) {
    return sample_radiation(profile.probabilities(mask), rng);
}

inline std::vector<std::uint8_t> sample_radiation(const TransferProfile& profile, const QdNetwork& net,
                                                  const ControlPattern& pattern, Rng& rng) {
    return sample_radiation(profile, pattern_mask(net, profile.destinations, pattern), rng);
}

}  // namespace qdnet::qd
