/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/value.hpp"

namespace decorr {

const char* Value::kind_name() const {
    switch (repr_.index()) {
        case 0: return "NULL";
        case 1: return "boolean";
        case 2: return "integer";
        default: return "string";
    }
}

std::string Value::to_string() const {
    if (is_null()) return "NULL";
    if (is_bool()) return as_bool() ? "true" : "false";
    if (is_int()) return std::to_string(as_int());
    std::string out = "\"";
    for (char c : as_string()) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::strong_ordering Value::operator<=>(const Value& other) const {
    if (repr_.index() != other.repr_.index()) return repr_.index() <=> other.repr_.index();
    switch (repr_.index()) {
        case 0: return std::strong_ordering::equal;
        case 1: return as_bool() <=> other.as_bool();
        case 2: return as_int() <=> other.as_int();
        default: {
            int c = as_string().compare(other.as_string());
            return c < 0 ? std::strong_ordering::less
                         : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
        }
    }
}

} // namespace decorr
