#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qdnet/core/format.hpp"
#include "qdnet/qd/evolve.hpp"
#include "qdnet/qd/profile.hpp"

namespace qdnet::qd {

/// Pattern as a bit string, character i = '1' when destination i is blocked.
inline std::string mask_string(PatternMask mask, std::size_t dots) {
    std::string s(dots, '0');
    for (std::size_t i = 0; i < dots; ++i)
        if (mask & (PatternMask{1} << i)) s[i] = '1';
    return s;
}

/// time_ps, then one population column per level (coherent levels first).
inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "time_ps";
    for (const auto& id : traj.coherent_levels) out += "," + id;
    for (const auto& id : traj.lower_levels) out += "," + id;
    out += "\n";
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        out += format_number(traj.times[k]);
        for (const auto& s : traj.coherent_populations) out += "," + format_number(s[k]);
        for (const auto& s : traj.lower_populations) out += "," + format_number(s[k]);
        out += "\n";
    }
    return out;
}

inline nlohmann::json trajectory_json(const Trajectory& traj) {
    nlohmann::json j;
    j["time_ps"] = traj.times;
    for (std::size_t i = 0; i < traj.coherent_levels.size(); ++i)
        j["populations"][traj.coherent_levels[i]] = traj.coherent_populations[i];
    for (std::size_t i = 0; i < traj.lower_levels.size(); ++i)
        j["populations"][traj.lower_levels[i]] = traj.lower_populations[i];
    for (std::size_t i = 0; i < traj.radiative_levels.size(); ++i)
        j["photon_yields"][traj.radiative_levels[i]] = traj.photon_yields[i].back();
    j["steps"] = traj.steps;
    j["max_conservation_drift"] = traj.max_conservation_drift;
    return j;
}

/// One row per pattern: pattern bits, then p_<dot> and yield_<dot>.
inline std::string profile_csv(const TransferProfile& profile) {
    std::string out = "pattern";
    for (const auto& d : profile.destinations) out += ",p_" + d;
    for (const auto& d : profile.destinations) out += ",yield_" + d;
    out += "\n";
    for (const auto& [mask, probs] : profile.entries) {
        out += mask_string(mask, profile.size());
        for (double p : probs) out += "," + format_number(p);
        auto y = profile.yields.find(mask);
        for (std::size_t i = 0; i < profile.size(); ++i)
            out += "," + (y == profile.yields.end() ? std::string("nan") : format_number(y->second[i]));
        out += "\n";
    }
    return out;
}

inline nlohmann::json profile_json(const TransferProfile& profile) {
    nlohmann::json j;
    j["gain"] = profile.gain;
    j["destinations"] = profile.destinations;
    j["patterns"] = nlohmann::json::array();
    for (const auto& [mask, probs] : profile.entries) {
        nlohmann::json row;
        row["pattern"] = mask_string(mask, profile.size());
        row["probabilities"] = probs;
        if (auto y = profile.yields.find(mask); y != profile.yields.end()) row["yields"] = y->second;
        j["patterns"].push_back(row);
    }
    return j;
}

}  // namespace qdnet::qd
