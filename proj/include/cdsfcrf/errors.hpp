#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdsfcrf {

// Base for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes disagree, or a grid is empty.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A user-supplied parameter is out of its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Argument outside a function's mathematical domain (self-pairs, zero norms).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed or unreadable file.
class FormatError : public Error {
public:
    using Error::Error;
};

// The optimizer produced a non-finite energy.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace cdsfcrf
