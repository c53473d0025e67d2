#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <json.hpp>

namespace smp {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest round-trippable decimal form; "inf"/"-inf" literals for the
// extended-real sentinels.
inline std::string format_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_real(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    return std::stod(s);
}

// JSON has no infinity literal; sentinels are emitted as strings.
inline nlohmann::json json_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline double real_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_real(j.get<std::string>());
    return j.get<double>();
}

} // namespace smp
