#pragma once

#include <stdexcept>
#include <string>

namespace jetvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live over different base spaces or fiber dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Division by an expression that is identically zero.
class DivisionByZero : public Error {
public:
    using Error::Error;
};

/// Name lookups, order mismatches and other problems with well-formed input.
class SemanticError : public Error {
public:
    using Error::Error;
};

/// Numeric evaluation left the domain of an elementary function, or hit
/// something that has no numeric value (unbound coordinate, opaque symbol).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Lexical or syntactic problem, with a 1-based source position.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          message_(message), line_(line), column_(column)
    {
    }

    [[nodiscard]] const std::string& message() const noexcept { return message_; }
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    std::string message_;
    int line_;
    int column_;
};

} // namespace jetvar
