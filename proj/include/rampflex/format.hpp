#pragma once

#include <string>

namespace rampflex {

/// Shortest decimal that round-trips to the same double; "nan"/"inf" as such.
std::string format_number(double v);

}  // namespace rampflex
