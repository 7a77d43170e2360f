/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/attribute.hpp"
#include "decorr/expr.hpp"
#include "decorr/plan.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace decorr {

/// Whether a fully independent subtree may be tagged with its domain values
/// through maps (χ) instead of a join with the domain.
enum class PerfectMode {
    Auto,    ///< maps when every domain column has a collected equivalence
    Always,  ///< maps; error if some column has no equivalence
    Never,   ///< always join with the domain
};

const char* to_string(PerfectMode mode);

struct UnnestConfig {
    PerfectMode perfect = PerfectMode::Auto;
    /// Bound on nested domain pushdowns (dependent joins inside dependent joins).
    int max_depth = 32;
};

/// State of one domain pushdown.
struct UnnestingInfo {
    /// Duplicate-free domain D; schema_of(domain) == outer_refs.
    Plan domain;
    /// A(D): the outer attributes referenced by the subtree being rewritten.
    AttrSet outer_refs;
    /// Outer attribute → the attribute that carries its value in the rewritten output.
    std::map<Attribute, Attribute> rename_map;
    /// Outer attribute → a local expression known to be equal to it.
    std::map<Attribute, ScalarExpr> equivalences;
};

/// Builds the pushdown state for domain, with a fresh representative per column.
UnnestingInfo make_unnesting_info(Plan domain);

/// Counters for the single-pass property.
struct UnnestStats {
    /// How often push_down processed each input node.
    std::map<const PlanNode*, int> push_down_visits;
    std::size_t domains_built = 0;
    std::size_t perfect_stops = 0;
    std::size_t join_stops = 0;

    int max_visits() const;
};

/// Paths to the dependent joins whose right input references the left input,
/// pre-order (topmost first).
std::vector<NodePath> find_dependent_joins(const Plan& p);

/// Hoists selections and maps out of the right input of each correlated
/// dependent join. When that leaves the right input independent, the node
/// becomes a regular join; otherwise the node is left as it was.
Plan simple_djoin_elimination(const Plan& p);

/// Π_{A^D}(left): the smallest legal domain.
Plan compute_domain(const Plan& left, const AttrSet& right_free_vars);

/// Rewrites D ▶ subtree into an equivalent plan without a dependent join on D.
/// The result has schema A(subtree) ∪ {rename_map[d]}, with rename_map[d]
/// carrying the value of d. Throws UnnestError.
Plan push_down(const UnnestingInfo& info, const Plan& subtree, const UnnestConfig& cfg = {},
               UnnestStats* stats = nullptr);

/// Replaces each outer attribute in e by its current representative.
/// Throws UnnestError if an outer attribute has no representative.
ScalarExpr rewrite_columns(const UnnestingInfo& info, const ScalarExpr& e);

/// Records `d = expr` conjuncts of pred (d an outer attribute, expr free of
/// outer attributes) as equivalences. Existing entries win.
UnnestingInfo collect_equivalences(UnnestingInfo info, const ScalarExpr& pred);

/// Removes every dependent join from p.
Plan unnest(const Plan& p, const UnnestConfig& cfg = {}, UnnestStats* stats = nullptr);

} // namespace decorr
