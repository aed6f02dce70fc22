#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace occsvm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied arguments that violate a precondition (dimensions, ranges).
class InputError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `location` is a line number, row/column pair or a
/// dotted field path, depending on the format being read.
class ParseError : public Error {
public:
    ParseError(std::string location, const std::string& what)
        : Error(location + ": " + what), location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

class VersionError : public Error {
public:
    using Error::Error;
};

/// Overflow or NaN inside the optimizer.
class NumericalError : public Error {
public:
    NumericalError(std::size_t outer_iteration, const std::string& what)
        : Error("outer iteration " + std::to_string(outer_iteration) + ": " + what),
          outer_iteration_(outer_iteration) {}

    std::size_t outer_iteration() const noexcept { return outer_iteration_; }

private:
    std::size_t outer_iteration_;
};

/// Training produced no usable support vector.
class ModelDegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace occsvm
