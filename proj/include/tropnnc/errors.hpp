#pragma once

#include <stdexcept>
#include <string>

namespace tropnnc {

// Error taxonomy shared by the library and the CLI exit-code mapping.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ModelFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedTopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace tropnnc
