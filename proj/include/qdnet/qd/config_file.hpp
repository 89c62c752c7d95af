#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qdnet/core/error.hpp"
#include "qdnet/qd/evolve.hpp"
#include "qdnet/qd/network.hpp"

namespace qdnet::qd {

/// Everything needed to reproduce a master-equation run.
struct NetworkSettings {
    QdNetwork network;
    IntegratorConfig integrator;
    double gain = 1.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + text + "'");
    }
}

inline std::vector<std::string> split_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    return words;
}

}  // namespace detail

/// Parses a `key = value` file. Blank lines, `#`/`;` comments and `[section]`
/// headers are ignored. Without any `level` entry the star network is built
/// from `standard_dots` and the rate keys; otherwise the network is given
/// explicitly by repeated entries:
///
///     level      = <id> <dot> <source|upper|lower> <radiative rate, 1/ns>
///     coupling   = <level a> <level b> <strength, 1/ps>
///     relaxation = <from> <to> <rate, 1/ps> <blocked rate, 1/ps>
inline NetworkSettings parse_network_config(const std::string& text) {
    NetworkSettings settings;
    StandardNetworkParams standard;
    std::size_t standard_dots = 4;
    QdNetwork explicit_net;
    bool explicit_levels = false;

    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = detail::trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';' || s[0] == '[') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (value.empty()) throw ParseError(line, "missing value for '" + key + "'");
        auto num = [&] { return detail::parse_double(value, line); };

        if (key == "standard_dots") {
            const double v = num();
            if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v)))
                throw ParseError(line, "standard_dots must be a positive integer");
            standard_dots = static_cast<std::size_t>(v);
        } else if (key == "coupling_time_ps") {
            standard.coupling_time_ps = num();
        } else if (key == "relaxation_time_ps") {
            standard.relaxation_time_ps = num();
        } else if (key == "lower_lifetime_ns") {
            standard.lower_lifetime_ns = num();
        } else if (key == "source_lifetime_ns") {
            standard.source_lifetime_ns = num();
        } else if (key == "blocked_factor") {
            standard.blocked_factor = num();
        } else if (key == "dt_ps") {
            settings.integrator.dt_ps = num();
        } else if (key == "horizon_ps") {
            settings.integrator.horizon_ps = num();
        } else if (key == "conservation_tolerance") {
            settings.integrator.conservation_tolerance = num();
        } else if (key == "sample_interval_ps") {
            settings.integrator.sample_interval_ps = num();
        } else if (key == "gain") {
            settings.gain = num();
        } else if (key == "level") {
            const auto w = detail::split_words(value);
            if (w.size() != 4) throw ParseError(line, "level needs: id dot kind radiative_rate");
            try {
                explicit_net.levels.push_back({w[0], w[1], parse_level_kind(w[2]), detail::parse_double(w[3], line)});
            } catch (const InvalidArgument& e) {
                throw ParseError(line, e.what());
            }
            explicit_levels = true;
        } else if (key == "coupling") {
            const auto w = detail::split_words(value);
            if (w.size() != 3) throw ParseError(line, "coupling needs: a b strength");
            explicit_net.couplings.push_back({w[0], w[1], detail::parse_double(w[2], line)});
        } else if (key == "relaxation") {
            const auto w = detail::split_words(value);
            if (w.size() != 4) throw ParseError(line, "relaxation needs: from to rate blocked_rate");
            explicit_net.relaxations.push_back(
                {w[0], w[1], detail::parse_double(w[2], line), detail::parse_double(w[3], line)});
        } else {
            throw ParseError(line, "unknown key '" + key + "'");
        }
    }

    if (explicit_levels) {
        settings.network = std::move(explicit_net);
        validate(settings.network);
    } else {
        if (!explicit_net.couplings.empty() || !explicit_net.relaxations.empty())
            throw ParseError(line, "coupling/relaxation entries need explicit level entries");
        settings.network = build_standard_network(standard_dots, standard);
    }
    validate(settings.integrator);
    require(settings.gain > 0.0, "gain must be > 0");
    return settings;
}

inline NetworkSettings load_network_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_network_config(buf.str());
}

}  // namespace qdnet::qd
