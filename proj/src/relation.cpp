/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/relation.hpp"

#include "decorr/errors.hpp"

#include <algorithm>

namespace decorr {

Relation::Relation(const AttrSet& schema) : columns_(schema.begin(), schema.end()) {}

std::optional<std::size_t> Relation::index_of(const Attribute& a) const {
    auto it = std::lower_bound(columns_.begin(), columns_.end(), a);
    if (it == columns_.end() || !(*it == a)) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

std::uint64_t Relation::count(const Tuple& x) const {
    if (!std::equal(x.attrs().begin(), x.attrs().end(), columns_.begin(), columns_.end())) return 0;
    return count_row(Row(x.values().begin(), x.values().end()));
}

std::uint64_t Relation::count_row(const Row& row) const {
    auto it = counts_.find(row);
    return it == counts_.end() ? 0 : it->second;
}

void Relation::add(const Tuple& x, std::uint64_t n) {
    if (!std::equal(x.attrs().begin(), x.attrs().end(), columns_.begin(), columns_.end()))
        throw SchemaError("relation " + format_attrs(schema()) + " cannot hold tuple " + x.str());
    add_row(Row(x.values().begin(), x.values().end()), n);
}

void Relation::add_row(Row row, std::uint64_t n) {
    if (row.size() != columns_.size()) throw SchemaError("relation row has wrong arity");
    if (n == 0) return;
    counts_[std::move(row)] += n;
}

Tuple Relation::tuple(const Row& row) const { return Tuple::from(columns_, row); }

std::uint64_t Relation::total() const {
    std::uint64_t sum = 0;
    for (const auto& [row, n] : counts_) sum += n;
    return sum;
}

bool Relation::is_duplicate_free() const {
    return std::all_of(counts_.begin(), counts_.end(), [](const auto& e) { return e.second == 1; });
}

bool equal_up_to_renaming(const Relation& a, const Relation& b) {
    if (a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.columns()[i].base() != b.columns()[i].base()) return false;
    return a.rows() == b.rows();
}

std::string RelationDiff::str() const {
    return "tuple " + tuple.str() + ": left count " + std::to_string(left_count) + ", right count " +
           std::to_string(right_count);
}

std::optional<RelationDiff> first_difference(const Relation& a, const Relation& b) {
    if (a.columns() != b.columns()) return RelationDiff{};
    auto i = a.rows().begin();
    auto j = b.rows().begin();
    while (i != a.rows().end() || j != b.rows().end()) {
        if (j == b.rows().end() || (i != a.rows().end() && i->first < j->first))
            return RelationDiff{a.tuple(i->first), i->second, 0};
        if (i == a.rows().end() || j->first < i->first) return RelationDiff{b.tuple(j->first), 0, j->second};
        if (i->second != j->second) return RelationDiff{a.tuple(i->first), i->second, j->second};
        ++i;
        ++j;
    }
    return std::nullopt;
}

} // namespace decorr
