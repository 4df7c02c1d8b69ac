#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A quantity is mathematically undefined for the given input
/// (zero-variance assortativity, zero-norm similarity, too few fit points).
class UndefinedValue : public Error {
public:
    using Error::Error;
};

/// Malformed record in a text artifact. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace lexnet
