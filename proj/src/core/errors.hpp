#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mlbicgstabt {

// Operand shapes disagree (matvec, dot, solve setup).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Matrix Market input that does not follow the format. Carries the 1-based
// line number of the offending line (0 when the file could not be read).
class ParseError : public std::runtime_error {
public:
    ParseError(std::int64_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::int64_t line() const noexcept { return line_; }

private:
    std::int64_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Incomplete factorization hit a pivot it could not replace.
class FactorizationError : public std::runtime_error {
public:
    FactorizationError(std::int64_t row, const std::string& what)
        : std::runtime_error(what), row_(row) {}

    std::int64_t row() const noexcept { return row_; }

private:
    std::int64_t row_;
};

// Initial residual is exactly zero, so there is nothing to build a shadow
// space from: x0 already solves the system.
class ZeroResidualError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace mlbicgstabt
