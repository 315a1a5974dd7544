#pragma once

#include <charconv>
#include <string>

namespace treegraft::detail {

// Shortest decimal form that reads back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

}  // namespace treegraft::detail
