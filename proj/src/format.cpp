#include "rampflex/format.hpp"

#include <charconv>

namespace rampflex {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // no "-0"
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace rampflex
