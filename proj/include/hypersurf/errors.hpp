#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypersurf {

/// Precondition violated by the caller (bad index, wrong size, misaligned lattice).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A point lies outside the domain simplex.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Expression evaluation hit a non-real result (division by zero, sqrt of a negative).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or semantic error while parsing an expression; `offset()` is a byte offset into the source.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Fixed-point iteration did not reach its stopping rule within the iteration budget.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& message, double last_residual, int iterations)
        : std::runtime_error(message), last_residual_(last_residual), iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

/// A configuration or system failed validation; `field()` names the offending input.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace hypersurf
