#pragma once

#include <stdexcept>
#include <string>

namespace kad {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not line-bound.
class ParseError : public Error {
public:
    ParseError(int line, const std::string &message)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Cross-file configuration problems (unregistered relations, bad schemas).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A KB mutation that violates a relation's domain or range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A lifecycle event delivered to an item in the wrong stage.
class StateError : public Error {
public:
    using Error::Error;
};

class RenderError : public Error {
public:
    using Error::Error;
};

class UnknownSession : public Error {
public:
    explicit UnknownSession(const std::string &id) : Error("unknown session: " + id) {}
};

} // namespace kad
