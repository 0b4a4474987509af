#pragma once

#include <stdexcept>
#include <string>

namespace rismod {

/// Violated configuration constraint. The message names the constraint.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its tolerance or produced an
/// out-of-range value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rismod
