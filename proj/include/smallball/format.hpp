#pragma once

#include <charconv>
#include <string>

namespace smallball {

// Shortest decimal text that parses back to the same double.
inline std::string shortest(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace smallball
