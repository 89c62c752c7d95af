#pragma once

#include <cstdint>
#include <random>

namespace qdnet {

/// SplitMix64 finalizer. Used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the independent stream owned by trial `index` of a run seeded
/// with `master`. The mapping is fixed so that results never depend on
/// which worker thread executed the trial:
///
///     derive_seed(master, index) = splitmix64(splitmix64(master) ^ splitmix64(index + 1))
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

/// Seeded 64-bit random stream with platform-independent derived draws.
///
/// std::uniform_real_distribution is implementation-defined, so uniform()
/// and below() are computed directly from the raw engine output to keep
/// outputs bitwise reproducible across standard libraries.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace qdnet
