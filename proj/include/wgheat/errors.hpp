// errors.hpp — Exception types shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace wgheat {

// Inputs outside the mathematical domain of an operation (negative rates,
// n >= 1/2 for a TLS bath, mismatched grids, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed: degenerate null space, singular system,
// step-size underflow, non-convergence, loss of positivity.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or schema-violating configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reading or writing files failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wgheat
