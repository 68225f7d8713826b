#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adaptix {

using InvalidArgument = std::invalid_argument;

// Malformed input document or line. `field` is a path such as
// "components[3].color"; `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& field, const std::string& what, std::size_t line = 0)
        : std::runtime_error(format(field, what, line)), field_(field), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& what, std::size_t line) {
        std::string msg;
        if (line > 0) msg += "line " + std::to_string(line) + ": ";
        if (!field.empty()) msg += field + ": ";
        return msg + what;
    }

    std::string field_;
    std::size_t line_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public ParseError {
public:
    using ParseError::ParseError;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace adaptix
