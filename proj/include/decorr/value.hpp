/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

namespace decorr {

/// The NULL marker. It is an ordinary domain element: NULL == NULL under identity.
struct Null {
    auto operator<=>(const Null&) const = default;
};

/// A scalar value: NULL, boolean, 64-bit integer, or string.
///
/// Comparison operators implement identity (NULL equals NULL, values of
/// different kinds are ordered by kind). SQL three-valued comparison lives in
/// the evaluator.
class Value {
public:
    using Repr = std::variant<Null, bool, std::int64_t, std::string>;

    Value() = default;
    Value(Null) {}
    Value(bool v) : repr_(v) {}
    Value(int v) : repr_(std::int64_t{v}) {}
    Value(std::int64_t v) : repr_(v) {}
    Value(std::string v) : repr_(std::move(v)) {}
    Value(const char* v) : repr_(std::string(v)) {}

    static Value null() { return Value(); }

    bool is_null() const { return std::holds_alternative<Null>(repr_); }
    bool is_bool() const { return std::holds_alternative<bool>(repr_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(repr_); }
    bool is_string() const { return std::holds_alternative<std::string>(repr_); }

    bool as_bool() const { return std::get<bool>(repr_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(repr_); }
    const std::string& as_string() const { return std::get<std::string>(repr_); }

    const Repr& repr() const { return repr_; }

    /// Name of the value's kind, for diagnostics.
    const char* kind_name() const;

    /// Literal spelling used by the text format: NULL, true, 42, "text".
    std::string to_string() const;

    bool operator==(const Value&) const = default;
    std::strong_ordering operator<=>(const Value& other) const;

private:
    Repr repr_;
};

} // namespace decorr
