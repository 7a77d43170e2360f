/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/attribute.hpp"

#include <algorithm>
#include <atomic>
#include <iterator>

namespace decorr {

namespace {
std::atomic<std::uint64_t> next_attribute_id{1};
}

std::string Attribute::str() const { return base_ + "#" + std::to_string(id_); }

Attribute fresh_attribute(std::string base) {
    return Attribute(std::move(base), next_attribute_id.fetch_add(1, std::memory_order_relaxed));
}

AttrSet to_set(const std::vector<Attribute>& attrs) { return AttrSet(attrs.begin(), attrs.end()); }

std::vector<Attribute> to_vector(const AttrSet& attrs) { return std::vector<Attribute>(attrs.begin(), attrs.end()); }

bool is_subset(const AttrSet& sub, const AttrSet& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

bool intersects(const AttrSet& a, const AttrSet& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else
            return true;
    }
    return false;
}

AttrSet set_union(const AttrSet& a, const AttrSet& b) {
    AttrSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

AttrSet set_intersection(const AttrSet& a, const AttrSet& b) {
    AttrSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

AttrSet set_difference(const AttrSet& a, const AttrSet& b) {
    AttrSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

std::string format_attrs(const AttrSet& attrs) {
    std::string out = "{";
    bool first = true;
    for (const auto& a : attrs) {
        if (!first) out += ", ";
        first = false;
        out += a.str();
    }
    return out + "}";
}

} // namespace decorr
