#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace predictsched {

// Simulation time and durations, in whole seconds.
using Seconds = std::int64_t;
using JobId = std::int64_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Numerical preconditions (zero variance, non-convergence, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

// Broken simulator invariant; indicates a policy or engine bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace predictsched
