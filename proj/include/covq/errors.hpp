#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covq {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// lambda_b == 0 makes both hypotheses identical; quantities that need
/// distinguishable hypotheses raise this instead of a generic InvalidArgument.
class DegenerateModel : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Malformed or unusable input data (sequence files, result files).
class InputError : public Error {
public:
    using Error::Error;
};

/// Structured parse failure: carries the offending line (1-based, 0 if not
/// applicable) and the field path, when known.
class ParseError : public InputError {
public:
    ParseError(const std::string& message, std::size_t line, std::string field)
        : InputError(format(message, line, field)), line_(line), field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& message, std::size_t line,
                              const std::string& field) {
        std::string out = message;
        if (!field.empty()) out += " (field '" + field + "')";
        if (line > 0) out += " at line " + std::to_string(line);
        return out;
    }

    std::size_t line_;
    std::string field_;
};

/// A persisted file was written by an incompatible format version.
class VersionError : public InputError {
public:
    VersionError(int found, int expected)
        : InputError("unsupported format version " + std::to_string(found) +
                     " (expected " + std::to_string(expected) + ")"),
          found_(found), expected_(expected) {}

    int found() const noexcept { return found_; }
    int expected() const noexcept { return expected_; }

private:
    int found_;
    int expected_;
};

/// Numeric routine failed to produce a trustworthy value.
class NumericError : public Error {
public:
    using Error::Error;
};

/// The log-likelihood ratio hit a zero transition probability.
class UndefinedLlr : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace covq
