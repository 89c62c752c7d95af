#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qdnet/core/error.hpp"

namespace qdnet::qd {

enum class LevelKind { source, upper, lower };

inline const char* to_string(LevelKind kind) {
    switch (kind) {
        case LevelKind::source: return "source";
        case LevelKind::upper: return "upper";
        case LevelKind::lower: return "lower";
    }
    return "?";
}

inline LevelKind parse_level_kind(const std::string& text) {
    if (text == "source") return LevelKind::source;
    if (text == "upper") return LevelKind::upper;
    if (text == "lower") return LevelKind::lower;
    throw InvalidArgument("unknown level kind '" + text + "'");
}

/// One exciton level of one dot.
///
/// `source` holds the initial exciton. `upper` levels take part in the
/// coherent near-field dynamics. `lower` levels are populated only through
/// sublevel relaxation and can be state-filled by control light.
struct LevelSpec {
    std::string id;
    std::string dot;
    LevelKind kind = LevelKind::upper;
    double radiative_rate_per_ns = 0.0;

    double radiative_rate_per_ps() const { return radiative_rate_per_ns / 1000.0; }
};

/// Near-field interaction between two resonant levels, as an angular
/// frequency in 1/ps (the inverse interaction time).
struct Coupling {
    std::string a;
    std::string b;
    double strength = 0.0;
};

/// Sublevel relaxation inside one dot. `blocked_rate` applies while the
/// destination is state-filled by control light.
struct RelaxationChannel {
    std::string from;
    std::string to;
    double rate = 0.0;
    double blocked_rate = 0.0;
};

struct QdNetwork {
    std::vector<LevelSpec> levels;
    std::vector<Coupling> couplings;
    std::vector<RelaxationChannel> relaxations;

    std::optional<std::size_t> find(const std::string& id) const {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i].id == id) return i;
        return std::nullopt;
    }

    std::size_t index_of(const std::string& id) const {
        if (auto i = find(id)) return *i;
        throw InvalidArgument("unknown level '" + id + "'");
    }

    const LevelSpec& level(const std::string& id) const { return levels[index_of(id)]; }

    std::size_t source_index() const {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i].kind == LevelKind::source) return i;
        throw InvalidArgument("network has no source level");
    }

    /// Dots owning a radiative lower level, in order of first appearance.
    /// These are the photodetected destinations of a transfer profile.
    std::vector<std::string> destination_dots() const {
        std::vector<std::string> dots;
        for (const auto& l : levels)
            if (l.kind == LevelKind::lower && l.radiative_rate_per_ns > 0.0 &&
                std::find(dots.begin(), dots.end(), l.dot) == dots.end())
                dots.push_back(l.dot);
        return dots;
    }

    /// Lower levels belonging to `dot`.
    std::vector<std::string> lower_levels_of(const std::string& dot) const {
        std::vector<std::string> ids;
        for (const auto& l : levels)
            if (l.kind == LevelKind::lower && l.dot == dot) ids.push_back(l.id);
        return ids;
    }
};

/// Throws InvalidArgument describing the first violated invariant.
///
/// Couplings join non-lower levels. Relaxation channels start at an upper
/// level and end at another level of the same dot; the destination may be
/// an upper level, which lets an incoherent hop re-enter a coherent stage.
/// Every coupling and channel must be reachable from the source through
/// couplings and channels; levels with neither are inert and allowed.
inline void validate(const QdNetwork& net) {
    std::set<std::string> ids;
    std::size_t sources = 0;
    for (const auto& l : net.levels) {
        require(!l.id.empty(), "level id must be non-empty");
        require(ids.insert(l.id).second, "duplicate level id '" + l.id + "'");
        require(l.radiative_rate_per_ns >= 0.0, "level '" + l.id + "': radiative_rate must be >= 0");
        if (l.kind == LevelKind::source) ++sources;
    }
    require(sources == 1, "network must have exactly one source level");

    const std::size_t n = net.levels.size();
    std::vector<std::vector<std::size_t>> adjacency(n);
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& c : net.couplings) {
        const std::size_t a = net.index_of(c.a), b = net.index_of(c.b);
        require(a != b, "coupling endpoints must differ ('" + c.a + "')");
        require(net.levels[a].kind != LevelKind::lower && net.levels[b].kind != LevelKind::lower,
                "coupling " + c.a + "-" + c.b + " touches a lower level");
        require(c.strength > 0.0, "coupling " + c.a + "-" + c.b + ": strength must be > 0");
        require(pairs.insert(std::minmax(a, b)).second,
                "duplicate coupling " + c.a + "-" + c.b);
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    for (const auto& r : net.relaxations) {
        const std::size_t f = net.index_of(r.from), t = net.index_of(r.to);
        require(f != t, "relaxation endpoints must differ ('" + r.from + "')");
        require(net.levels[f].kind == LevelKind::upper,
                "relaxation from '" + r.from + "' must start at an upper level");
        require(net.levels[f].dot == net.levels[t].dot,
                "relaxation " + r.from + "->" + r.to + " crosses dots");
        require(r.blocked_rate >= 0.0 && r.rate > r.blocked_rate,
                "relaxation " + r.from + "->" + r.to + ": need rate > blocked_rate >= 0");
        adjacency[f].push_back(t);
        adjacency[t].push_back(f);
    }

    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(net.source_index());
    seen[net.source_index()] = true;
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop();
        for (std::size_t w : adjacency[v])
            if (!seen[w]) {
                seen[w] = true;
                frontier.push(w);
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        require(seen[i] || adjacency[i].empty(),
                "level '" + net.levels[i].id + "' is wired but unreachable from the source");
}

/// Rates of the star network. Defaults are the typical parameter set:
/// U^-1 = 100 ps, Gamma^-1 = 10 ps, gamma_L^-1 = 1 ns, gamma_S^-1 = 2.92 ns.
struct StandardNetworkParams {
    double coupling_time_ps = 100.0;
    double relaxation_time_ps = 10.0;
    double lower_lifetime_ns = 1.0;
    double source_lifetime_ns = 2.92;
    /// State filling divides the feeding relaxation rate by this factor.
    double blocked_factor = 100.0;
};

inline std::string large_dot_name(std::size_t i) { return "L" + std::to_string(i + 1); }
inline std::string upper_level_name(std::size_t i) { return large_dot_name(i) + "_U"; }
inline std::string lower_level_name(std::size_t i) { return large_dot_name(i) + "_L"; }

/// A small source dot S surrounded by `num_large_dots` identical larger dots.
/// Dot i contributes levels "Li_U" (resonant with S) and "Li_L" (radiative).
inline QdNetwork build_standard_network(std::size_t num_large_dots,
                                        const StandardNetworkParams& params = {}) {
    require(num_large_dots >= 1, "build_standard_network: need at least one large dot");
    require(params.coupling_time_ps > 0 && params.relaxation_time_ps > 0 &&
                params.lower_lifetime_ns > 0 && params.source_lifetime_ns > 0 &&
                params.blocked_factor > 1.0,
            "build_standard_network: rates must be positive and blocked_factor > 1");
    QdNetwork net;
    net.levels.push_back({"S", "S", LevelKind::source, 1.0 / params.source_lifetime_ns});
    for (std::size_t i = 0; i < num_large_dots; ++i)
        net.levels.push_back({upper_level_name(i), large_dot_name(i), LevelKind::upper, 0.0});
    for (std::size_t i = 0; i < num_large_dots; ++i)
        net.levels.push_back(
            {lower_level_name(i), large_dot_name(i), LevelKind::lower, 1.0 / params.lower_lifetime_ns});
    const double relax = 1.0 / params.relaxation_time_ps;
    for (std::size_t i = 0; i < num_large_dots; ++i) {
        net.couplings.push_back({"S", upper_level_name(i), 1.0 / params.coupling_time_ps});
        net.relaxations.push_back(
            {upper_level_name(i), lower_level_name(i), relax, relax / params.blocked_factor});
    }
    validate(net);
    return net;
}

}  // namespace qdnet::qd
