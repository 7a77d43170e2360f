/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/tuple.hpp"

#include "decorr/errors.hpp"

#include <algorithm>
#include <numeric>

namespace decorr {

Tuple Tuple::single(Attribute a, Value x) {
    Tuple t;
    t.attrs_.push_back(std::move(a));
    t.values_.push_back(std::move(x));
    return t;
}

Tuple Tuple::from(std::span<const Attribute> attrs, std::span<const Value> values) {
    if (attrs.size() != values.size()) throw SchemaError("tuple: attribute and value counts differ");
    std::vector<std::size_t> order(attrs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return attrs[i] < attrs[j]; });
    Tuple t;
    for (std::size_t i : order) {
        if (!t.attrs_.empty() && t.attrs_.back() == attrs[i])
            throw SchemaError("tuple: duplicate attribute " + attrs[i].str());
        t.attrs_.push_back(attrs[i]);
        t.values_.push_back(values[i]);
    }
    return t;
}

AttrSet Tuple::attributes() const { return AttrSet(attrs_.begin(), attrs_.end()); }

const Value* Tuple::find(const Attribute& a) const {
    auto it = std::lower_bound(attrs_.begin(), attrs_.end(), a);
    if (it == attrs_.end() || !(*it == a)) return nullptr;
    return &values_[static_cast<std::size_t>(it - attrs_.begin())];
}

const Value& Tuple::at(const Attribute& a) const {
    if (const Value* v = find(a)) return *v;
    throw SchemaError("tuple has no attribute " + a.str());
}

void Tuple::set(const Attribute& a, Value x) {
    auto it = std::lower_bound(attrs_.begin(), attrs_.end(), a);
    auto pos = static_cast<std::size_t>(it - attrs_.begin());
    if (it != attrs_.end() && *it == a) {
        values_[pos] = std::move(x);
        return;
    }
    attrs_.insert(it, a);
    values_.insert(values_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(x));
}

std::string Tuple::str() const {
    std::string out = "[";
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
        if (i) out += ", ";
        out += attrs_[i].str() + ":" + values_[i].to_string();
    }
    return out + "]";
}

Tuple tuple_restrict(const Tuple& t, const AttrSet& attrs) {
    Tuple out;
    for (const auto& a : attrs) {
        const Value* v = t.find(a);
        if (!v) throw SchemaError("restrict: attribute " + a.str() + " not in tuple " + t.str());
        out.set(a, *v);
    }
    return out;
}

Tuple tuple_concat(const Tuple& t1, const Tuple& t2) {
    Tuple out = t1;
    for (std::size_t i = 0; i < t2.size(); ++i) {
        const auto& a = t2.attrs()[i];
        if (t1.contains(a)) throw SchemaError("concat: attribute " + a.str() + " present in both tuples");
        out.set(a, t2.values()[i]);
    }
    return out;
}

} // namespace decorr
