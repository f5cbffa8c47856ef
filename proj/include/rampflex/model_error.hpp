#pragma once

#include <stdexcept>

namespace rampflex {

/// Invalid model parameters or an unusable solution.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace rampflex
