#pragma once

#include <stdexcept>
#include <string>

namespace qd {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: invalid arguments, missing files, not a git repository.
class InputError : public Error {
public:
    using Error::Error;
};

/// Malformed structured data (API payloads, diffs, artifacts).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A transient failure that was retried and still failed.
class RetryableError : public Error {
public:
    RetryableError(const std::string& what, int attempts)
        : Error(what + " (after " + std::to_string(attempts) + " attempts)"), attempts_(attempts) {}

    [[nodiscard]] int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

/// Hunk context did not match the text it was applied to.
class PatchConflict : public Error {
public:
    PatchConflict(const std::string& what, std::size_t line)
        : Error(what + " at line " + std::to_string(line)), line_(line) {}

    /// 1-based line number of the first mismatching line.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace qd
