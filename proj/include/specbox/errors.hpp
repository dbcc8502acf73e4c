#pragma once

#include <stdexcept>
#include <string>

namespace specbox {

// Invalid or inconsistent user input (config files, CLI arguments, bad parameters).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: eigensolver breakdown, step-size underflow, norm blow-up.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / serialization failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace specbox
