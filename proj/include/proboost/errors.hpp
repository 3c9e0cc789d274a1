#pragma once

#include <stdexcept>
#include <string>

namespace proboost {

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDifferences : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedConfiguration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace proboost
