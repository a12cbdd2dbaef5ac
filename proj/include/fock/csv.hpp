#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace fock {

/// Shortest round-trip decimal form; identical input always yields identical text.
inline std::string fmt(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace fock
