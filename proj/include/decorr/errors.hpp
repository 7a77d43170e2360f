/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace decorr {

/// Operator precondition violated (disjointness, missing attribute, ...).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while evaluating a plan or scalar expression.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside the decorrelation rewrite.
class UnnestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed plan, script, or relation text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace decorr
