/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/attribute.hpp"
#include "decorr/expr.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace decorr {

enum class PlanKind {
    Scan,
    Select,
    Map,
    ProjectDistinct,
    Project,
    Rename,
    Union,
    Intersect,
    Except,
    Cross,
    Join,
    DependentJoin,
    SemiJoin,
    AntiJoin,
    OuterJoin,
    NullPad,
    GroupBy,
};

inline constexpr std::size_t kPlanKindCount = 17;

const char* kind_name(PlanKind kind);
bool is_binary(PlanKind kind);
/// Join-like nodes carrying a predicate: Join, DependentJoin, SemiJoin, AntiJoin, OuterJoin.
bool has_predicate(PlanKind kind);
bool is_set_operation(PlanKind kind);

enum class AggKind { CountStar, Count, Sum, Min, Max };

const char* kind_name(AggKind kind);

struct AggFn {
    AggKind kind = AggKind::CountStar;
    std::optional<Attribute> input;  // absent for CountStar

    bool operator==(const AggFn&) const = default;
};

/// One `a : f` entry of a group-by.
struct Aggregate {
    Attribute output;
    AggFn fn;

    bool operator==(const Aggregate&) const = default;
};

struct PlanNode;
/// Immutable logical plan. Subtrees may be shared, so a plan is in general a DAG.
using Plan = std::shared_ptr<const PlanNode>;

/// One logical operator. Nodes are created only through the `plan::` factories,
/// which check the operator's local preconditions and cache its output schema
/// A(p) and free variables F(p).
struct PlanNode {
    PlanKind kind;
    std::string table;          // Scan
    AttrSet attrs;              // Scan columns, projection list, NullPad list, GroupBy keys
    Attribute target;           // Map output, Rename new name
    Attribute source;           // Rename old name
    ScalarExpr expr;            // Select/join predicate, Map expression
    std::vector<Aggregate> aggs;  // GroupBy
    std::vector<Plan> children;

    AttrSet schema;
    AttrSet free_vars;

    const Plan& child() const { return children[0]; }
    const Plan& left() const { return children[0]; }
    const Plan& right() const { return children[1]; }
};

namespace plan {
Plan scan(std::string table, AttrSet columns);
Plan select(ScalarExpr pred, Plan child);
Plan map(Attribute a, ScalarExpr e, Plan child);
Plan project_distinct(AttrSet attrs, Plan child);
Plan project(AttrSet attrs, Plan child);
Plan rename(Attribute to, Attribute from, Plan child);
Plan set_union(Plan l, Plan r);
Plan intersect(Plan l, Plan r);
Plan except(Plan l, Plan r);
Plan cross(Plan l, Plan r);
Plan join(ScalarExpr pred, Plan l, Plan r);
Plan dependent_join(ScalarExpr pred, Plan l, Plan r);
Plan semi_join(ScalarExpr pred, Plan l, Plan r);
Plan anti_join(ScalarExpr pred, Plan l, Plan r);
Plan outer_join(ScalarExpr pred, Plan l, Plan r);
Plan null_pad(AttrSet attrs, Plan child);
Plan group_by(AttrSet keys, std::vector<Aggregate> aggs, Plan child);

/// Rebuilds node with new children, keeping all other parameters.
Plan with_children(const PlanNode& node, std::vector<Plan> children);
/// Rebuilds node with a new predicate/expression.
Plan with_expr(const PlanNode& node, ScalarExpr e);
} // namespace plan

/// A(p).
const AttrSet& schema_of(const Plan& p);

/// F(p): attributes referenced inside p but not produced by an operator in p.
/// The left input of a dependent join binds the right input's references.
const AttrSet& free_vars_plan(const Plan& p);

/// Full validator walk: re-checks every node's local preconditions and that
/// F(p) ⊆ outer. Throws SchemaError.
void validate(const Plan& p, const AttrSet& outer = {});

/// Child-index path from the root; empty for the root itself.
using NodePath = std::vector<std::size_t>;

/// Pre-order traversal (parents before children, left before right).
void for_each_node(const Plan& p, const std::function<void(const Plan&, const NodePath&)>& fn);

const Plan& node_at(const Plan& p, const NodePath& path);

std::size_t count_nodes(const Plan& p);
std::size_t count_kind(const Plan& p, PlanKind kind);

/// Exact equality, including attribute ids.
bool structurally_equal(const Plan& a, const Plan& b);

/// Equality up to a consistent one-to-one renaming of attribute ids.
bool alpha_equivalent(const Plan& a, const Plan& b);

} // namespace decorr
