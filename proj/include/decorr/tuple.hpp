/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/attribute.hpp"
#include "decorr/value.hpp"

#include <span>
#include <string>
#include <vector>

namespace decorr {

/// An unordered attribute → value mapping. Stored as two parallel vectors
/// sorted by attribute id, so equality is entry-wise.
class Tuple {
public:
    Tuple() = default;

    /// The single-attribute tuple [a : x].
    static Tuple single(Attribute a, Value x);

    /// Build from parallel attribute/value lists; attributes must be distinct.
    static Tuple from(std::span<const Attribute> attrs, std::span<const Value> values);

    std::size_t size() const { return attrs_.size(); }
    bool empty() const { return attrs_.empty(); }

    /// A(t).
    AttrSet attributes() const;
    std::span<const Attribute> attrs() const { return attrs_; }
    std::span<const Value> values() const { return values_; }

    bool contains(const Attribute& a) const { return find(a) != nullptr; }
    const Value* find(const Attribute& a) const;
    /// t.a; throws SchemaError when a ∉ A(t).
    const Value& at(const Attribute& a) const;

    /// Insert or overwrite one entry.
    void set(const Attribute& a, Value x);

    std::string str() const;

    bool operator==(const Tuple&) const = default;

private:
    std::vector<Attribute> attrs_;
    std::vector<Value> values_;
};

/// t|A'. Throws SchemaError if attrs ⊄ A(t).
Tuple tuple_restrict(const Tuple& t, const AttrSet& attrs);

/// t1 ∘ t2. Throws SchemaError naming the first shared attribute.
Tuple tuple_concat(const Tuple& t1, const Tuple& t2);

} // namespace decorr
