#pragma once

#include <charconv>
#include <string>

namespace ilab {

// Shortest decimal text that round-trips to the same double.
inline std::string fmt_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

}  // namespace ilab
