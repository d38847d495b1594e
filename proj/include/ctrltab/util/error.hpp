#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctrltab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violated a documented invariant (bad reference, out-of-range value).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or hyperparameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. Carries the line (1-based) or byte offset when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Lookup of an id that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Remote endpoint unreachable or failing after retries.
class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace ctrltab
