#pragma once

#include <stdexcept>
#include <string>

namespace satmec {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request is well-formed but cannot be satisfied (no feasible subset,
/// zero-rate route, missing route kind, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Malformed input document. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace satmec
