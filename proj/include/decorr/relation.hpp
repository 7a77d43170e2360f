/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/attribute.hpp"
#include "decorr/tuple.hpp"
#include "decorr/value.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace decorr {

/// A finite multiset of tuples over a fixed schema, stored as its
/// characteristic function: canonical row → multiplicity. A row holds the
/// tuple's values in ascending attribute-id order; absent rows have
/// multiplicity zero and stored counts are always positive.
class Relation {
public:
    using Row = std::vector<Value>;
    using Counts = std::map<Row, std::uint64_t>;

    Relation() = default;
    explicit Relation(const AttrSet& schema);

    /// A(R) in id order; also the column order of every row.
    const std::vector<Attribute>& columns() const { return columns_; }
    AttrSet schema() const { return to_set(columns_); }
    std::size_t arity() const { return columns_.size(); }

    /// Column position of a, or nullopt.
    std::optional<std::size_t> index_of(const Attribute& a) const;

    /// m_R(x). Tuples with a different attribute set have multiplicity 0.
    std::uint64_t count(const Tuple& x) const;
    std::uint64_t count_row(const Row& row) const;

    /// Adds n copies of x; A(x) must equal A(R).
    void add(const Tuple& x, std::uint64_t n = 1);
    void add_row(Row row, std::uint64_t n = 1);

    const Counts& rows() const { return counts_; }
    Tuple tuple(const Row& row) const;

    /// Number of distinct tuples.
    std::size_t distinct_size() const { return counts_.size(); }
    /// Sum of all multiplicities.
    std::uint64_t total() const;
    bool empty() const { return counts_.empty(); }
    bool is_duplicate_free() const;

    bool operator==(const Relation&) const = default;

private:
    std::vector<Attribute> columns_;
    Counts counts_;
};

/// Equality after matching columns positionally (same arity and base names);
/// ids may differ. Used for text round-trips where parsing issues fresh ids.
bool equal_up_to_renaming(const Relation& a, const Relation& b);

/// First tuple where the characteristic functions differ, with both counts.
struct RelationDiff {
    Tuple tuple;
    std::uint64_t left_count = 0;
    std::uint64_t right_count = 0;
    std::string str() const;
};

/// nullopt when the relations are equal; a schema mismatch is reported with an
/// empty tuple and zero counts.
std::optional<RelationDiff> first_difference(const Relation& a, const Relation& b);

} // namespace decorr
