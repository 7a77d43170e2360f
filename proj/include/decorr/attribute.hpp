/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace decorr {

/// A column identity. Equality, ordering and hashing use the id only; the base
/// name is for display.
class Attribute {
public:
    Attribute() = default;

    const std::string& base() const { return base_; }
    std::uint64_t id() const { return id_; }

    /// Printed form `base#id`.
    std::string str() const;

    bool operator==(const Attribute& o) const { return id_ == o.id_; }
    auto operator<=>(const Attribute& o) const { return id_ <=> o.id_; }

private:
    Attribute(std::string base, std::uint64_t id) : base_(std::move(base)), id_(id) {}
    friend Attribute fresh_attribute(std::string base);

    std::string base_;
    std::uint64_t id_ = 0;
};

/// Returns an attribute whose id has never been issued before in this process.
/// Ids are strictly increasing across calls; thread-safe.
Attribute fresh_attribute(std::string base);

/// Attribute sets are ordered by id.
using AttrSet = std::set<Attribute>;

AttrSet to_set(const std::vector<Attribute>& attrs);
std::vector<Attribute> to_vector(const AttrSet& attrs);

bool is_subset(const AttrSet& sub, const AttrSet& super);
bool intersects(const AttrSet& a, const AttrSet& b);
AttrSet set_union(const AttrSet& a, const AttrSet& b);
AttrSet set_intersection(const AttrSet& a, const AttrSet& b);
AttrSet set_difference(const AttrSet& a, const AttrSet& b);

/// `{a#1, b#2}` style rendering for diagnostics.
std::string format_attrs(const AttrSet& attrs);

} // namespace decorr

template <>
struct std::hash<decorr::Attribute> {
    std::size_t operator()(const decorr::Attribute& a) const noexcept { return std::hash<std::uint64_t>{}(a.id()); }
};
