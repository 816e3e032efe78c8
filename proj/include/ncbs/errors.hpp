#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncbs {

/// Malformed user input: expression syntax, config schema, unknown keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Expression syntax error. `offset` is the character position in the source text.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& message, std::size_t offset)
        : ConfigError(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Identifier that is neither a declared variable nor a known function.
class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(const std::string& name, std::size_t offset)
        : ParseError("unknown identifier '" + name + "'", offset), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// ln/sqrt outside their domain, division by zero, overflow during evaluation.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated model constraint: parameter matching, positivity, ellipticity.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside the discrete solver: singular system, non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ncbs
