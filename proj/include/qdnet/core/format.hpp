#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace qdnet {

/// Shortest round-trip decimal representation. Deterministic, locale-free.
inline std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

}  // namespace qdnet
