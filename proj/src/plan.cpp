/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/plan.hpp"

#include "decorr/errors.hpp"

#include <algorithm>
#include <unordered_map>

namespace decorr {

const char* kind_name(PlanKind kind) {
    switch (kind) {
        case PlanKind::Scan: return "scan";
        case PlanKind::Select: return "select";
        case PlanKind::Map: return "map";
        case PlanKind::ProjectDistinct: return "project-distinct";
        case PlanKind::Project: return "project";
        case PlanKind::Rename: return "rename";
        case PlanKind::Union: return "union";
        case PlanKind::Intersect: return "intersect";
        case PlanKind::Except: return "except";
        case PlanKind::Cross: return "cross";
        case PlanKind::Join: return "join";
        case PlanKind::DependentJoin: return "djoin";
        case PlanKind::SemiJoin: return "semijoin";
        case PlanKind::AntiJoin: return "antijoin";
        case PlanKind::OuterJoin: return "outerjoin";
        case PlanKind::NullPad: return "nullpad";
        case PlanKind::GroupBy: return "groupby";
    }
    return "?";
}

const char* kind_name(AggKind kind) {
    switch (kind) {
        case AggKind::CountStar: return "count*";
        case AggKind::Count: return "count";
        case AggKind::Sum: return "sum";
        case AggKind::Min: return "min";
        case AggKind::Max: return "max";
    }
    return "?";
}

bool is_set_operation(PlanKind kind) {
    return kind == PlanKind::Union || kind == PlanKind::Intersect || kind == PlanKind::Except;
}

bool has_predicate(PlanKind kind) {
    switch (kind) {
        case PlanKind::Join:
        case PlanKind::DependentJoin:
        case PlanKind::SemiJoin:
        case PlanKind::AntiJoin:
        case PlanKind::OuterJoin: return true;
        default: return false;
    }
}

bool is_binary(PlanKind kind) { return is_set_operation(kind) || kind == PlanKind::Cross || has_predicate(kind); }

namespace {

[[noreturn]] void violation(PlanKind kind, const std::string& what) {
    throw SchemaError(std::string(kind_name(kind)) + ": " + what);
}

/// Computes schema and free variables of a node whose parameters and children
/// are filled in, checking the operator's preconditions.
Plan finish(PlanNode node) {
    for (const auto& c : node.children)
        if (!c) violation(node.kind, "missing input");
    if ((node.kind == PlanKind::Select || node.kind == PlanKind::Map || has_predicate(node.kind)) && !node.expr)
        violation(node.kind, "missing expression");

    const PlanKind kind = node.kind;
    switch (kind) {
        case PlanKind::Scan: {
            if (node.table.empty()) violation(kind, "empty table name");
            node.schema = node.attrs;
            break;
        }
        case PlanKind::Select: {
            const auto& c = *node.child();
            node.schema = c.schema;
            node.free_vars = set_union(c.free_vars, set_difference(free_vars_expr(node.expr), c.schema));
            break;
        }
        case PlanKind::Map: {
            const auto& c = *node.child();
            if (c.schema.contains(node.target))
                violation(kind, "attribute " + node.target.str() + " already in input " + format_attrs(c.schema));
            node.schema = c.schema;
            node.schema.insert(node.target);
            node.free_vars = set_union(c.free_vars, set_difference(free_vars_expr(node.expr), c.schema));
            break;
        }
        case PlanKind::ProjectDistinct:
        case PlanKind::Project: {
            const auto& c = *node.child();
            if (!is_subset(node.attrs, c.schema))
                violation(kind, format_attrs(node.attrs) + " not contained in input " + format_attrs(c.schema));
            node.schema = node.attrs;
            node.free_vars = c.free_vars;
            break;
        }
        case PlanKind::Rename: {
            const auto& c = *node.child();
            if (!c.schema.contains(node.source))
                violation(kind, "attribute " + node.source.str() + " not in input " + format_attrs(c.schema));
            if (c.schema.contains(node.target))
                violation(kind, "attribute " + node.target.str() + " already in input " + format_attrs(c.schema));
            node.schema = c.schema;
            node.schema.erase(node.source);
            node.schema.insert(node.target);
            node.free_vars = c.free_vars;
            break;
        }
        case PlanKind::Union:
        case PlanKind::Intersect:
        case PlanKind::Except: {
            const auto& l = *node.left();
            const auto& r = *node.right();
            if (l.schema != r.schema)
                violation(kind, "input schemas differ: " + format_attrs(l.schema) + " vs " + format_attrs(r.schema));
            node.schema = l.schema;
            node.free_vars = set_union(l.free_vars, r.free_vars);
            break;
        }
        case PlanKind::Cross:
        case PlanKind::Join:
        case PlanKind::DependentJoin:
        case PlanKind::SemiJoin:
        case PlanKind::AntiJoin:
        case PlanKind::OuterJoin: {
            const auto& l = *node.left();
            const auto& r = *node.right();
            if (intersects(l.schema, r.schema))
                violation(kind, "input schemas overlap in " + format_attrs(set_intersection(l.schema, r.schema)));
            if (intersects(l.free_vars, r.schema))
                violation(kind, "left input references right attributes " +
                                    format_attrs(set_intersection(l.free_vars, r.schema)));
            if (kind != PlanKind::DependentJoin && intersects(r.free_vars, l.schema))
                violation(kind, "right input references left attributes " +
                                    format_attrs(set_intersection(r.free_vars, l.schema)) +
                                    " (needs a dependent join)");
            AttrSet both = set_union(l.schema, r.schema);
            node.schema = (kind == PlanKind::SemiJoin || kind == PlanKind::AntiJoin) ? l.schema : both;
            node.free_vars = set_union(l.free_vars, set_difference(r.free_vars, l.schema));
            if (node.expr) node.free_vars = set_union(node.free_vars, set_difference(free_vars_expr(node.expr), both));
            break;
        }
        case PlanKind::NullPad: {
            const auto& c = *node.child();
            node.schema = set_union(c.schema, node.attrs);
            node.free_vars = c.free_vars;
            break;
        }
        case PlanKind::GroupBy: {
            const auto& c = *node.child();
            if (!is_subset(node.attrs, c.schema))
                violation(kind, "keys " + format_attrs(node.attrs) + " not contained in input " + format_attrs(c.schema));
            node.schema = node.attrs;
            for (const auto& agg : node.aggs) {
                if (c.schema.contains(agg.output))
                    violation(kind, "aggregate output " + agg.output.str() + " already in input");
                if (!node.schema.insert(agg.output).second)
                    violation(kind, "aggregate output " + agg.output.str() + " defined twice");
                if (agg.fn.kind == AggKind::CountStar) {
                    if (agg.fn.input) violation(kind, "count* takes no input attribute");
                } else if (!agg.fn.input) {
                    violation(kind, std::string(kind_name(agg.fn.kind)) + " needs an input attribute");
                } else if (!c.schema.contains(*agg.fn.input)) {
                    violation(kind, "aggregate input " + agg.fn.input->str() + " not in input");
                }
            }
            node.free_vars = c.free_vars;
            break;
        }
    }
    if (intersects(node.free_vars, node.schema))
        violation(kind, "attributes " + format_attrs(set_intersection(node.free_vars, node.schema)) +
                            " are both produced and referenced from outside");
    return std::make_shared<const PlanNode>(std::move(node));
}

PlanNode unary(PlanKind kind, Plan child) {
    PlanNode n{};
    n.kind = kind;
    n.children = {std::move(child)};
    return n;
}

PlanNode binary(PlanKind kind, ScalarExpr pred, Plan l, Plan r) {
    PlanNode n{};
    n.kind = kind;
    n.expr = std::move(pred);
    n.children = {std::move(l), std::move(r)};
    return n;
}

} // namespace

namespace plan {

Plan scan(std::string table, AttrSet columns) {
    PlanNode n{};
    n.kind = PlanKind::Scan;
    n.table = std::move(table);
    n.attrs = std::move(columns);
    return finish(std::move(n));
}

Plan select(ScalarExpr pred, Plan child) {
    auto n = unary(PlanKind::Select, std::move(child));
    n.expr = std::move(pred);
    return finish(std::move(n));
}

Plan map(Attribute a, ScalarExpr e, Plan child) {
    auto n = unary(PlanKind::Map, std::move(child));
    n.target = std::move(a);
    n.expr = std::move(e);
    return finish(std::move(n));
}

Plan project_distinct(AttrSet attrs, Plan child) {
    auto n = unary(PlanKind::ProjectDistinct, std::move(child));
    n.attrs = std::move(attrs);
    return finish(std::move(n));
}

Plan project(AttrSet attrs, Plan child) {
    auto n = unary(PlanKind::Project, std::move(child));
    n.attrs = std::move(attrs);
    return finish(std::move(n));
}

Plan rename(Attribute to, Attribute from, Plan child) {
    auto n = unary(PlanKind::Rename, std::move(child));
    n.target = std::move(to);
    n.source = std::move(from);
    return finish(std::move(n));
}

Plan set_union(Plan l, Plan r) { return finish(binary(PlanKind::Union, nullptr, std::move(l), std::move(r))); }
Plan intersect(Plan l, Plan r) { return finish(binary(PlanKind::Intersect, nullptr, std::move(l), std::move(r))); }
Plan except(Plan l, Plan r) { return finish(binary(PlanKind::Except, nullptr, std::move(l), std::move(r))); }
Plan cross(Plan l, Plan r) { return finish(binary(PlanKind::Cross, nullptr, std::move(l), std::move(r))); }
Plan join(ScalarExpr pred, Plan l, Plan r) {
    return finish(binary(PlanKind::Join, std::move(pred), std::move(l), std::move(r)));
}
Plan dependent_join(ScalarExpr pred, Plan l, Plan r) {
    return finish(binary(PlanKind::DependentJoin, std::move(pred), std::move(l), std::move(r)));
}
Plan semi_join(ScalarExpr pred, Plan l, Plan r) {
    return finish(binary(PlanKind::SemiJoin, std::move(pred), std::move(l), std::move(r)));
}
Plan anti_join(ScalarExpr pred, Plan l, Plan r) {
    return finish(binary(PlanKind::AntiJoin, std::move(pred), std::move(l), std::move(r)));
}
Plan outer_join(ScalarExpr pred, Plan l, Plan r) {
    return finish(binary(PlanKind::OuterJoin, std::move(pred), std::move(l), std::move(r)));
}

Plan null_pad(AttrSet attrs, Plan child) {
    auto n = unary(PlanKind::NullPad, std::move(child));
    n.attrs = std::move(attrs);
    return finish(std::move(n));
}

Plan group_by(AttrSet keys, std::vector<Aggregate> aggs, Plan child) {
    auto n = unary(PlanKind::GroupBy, std::move(child));
    n.attrs = std::move(keys);
    n.aggs = std::move(aggs);
    return finish(std::move(n));
}

Plan with_children(const PlanNode& node, std::vector<Plan> children) {
    if (children.size() != node.children.size()) violation(node.kind, "wrong number of inputs");
    PlanNode n = node;
    n.children = std::move(children);
    n.schema.clear();
    n.free_vars.clear();
    return finish(std::move(n));
}

Plan with_expr(const PlanNode& node, ScalarExpr e) {
    PlanNode n = node;
    n.expr = std::move(e);
    n.schema.clear();
    n.free_vars.clear();
    return finish(std::move(n));
}

} // namespace plan

const AttrSet& schema_of(const Plan& p) { return p->schema; }

const AttrSet& free_vars_plan(const Plan& p) { return p->free_vars; }

void validate(const Plan& p, const AttrSet& outer) {
    // Rebuilding every node re-runs the precondition checks bottom-up.
    std::function<Plan(const Plan&)> rebuild = [&](const Plan& n) -> Plan {
        std::vector<Plan> kids;
        for (const auto& c : n->children) kids.push_back(rebuild(c));
        return kids.empty() ? plan::with_expr(*n, n->expr) : plan::with_children(*n, std::move(kids));
    };
    Plan checked = rebuild(p);
    if (checked->schema != p->schema || checked->free_vars != p->free_vars)
        throw SchemaError("validate: cached schema information is stale");
    if (!is_subset(p->free_vars, outer))
        throw SchemaError("unbound free variables " + format_attrs(set_difference(p->free_vars, outer)));
}

void for_each_node(const Plan& p, const std::function<void(const Plan&, const NodePath&)>& fn) {
    NodePath path;
    std::function<void(const Plan&)> walk = [&](const Plan& n) {
        fn(n, path);
        for (std::size_t i = 0; i < n->children.size(); ++i) {
            path.push_back(i);
            walk(n->children[i]);
            path.pop_back();
        }
    };
    walk(p);
}

const Plan& node_at(const Plan& p, const NodePath& path) {
    const Plan* cur = &p;
    for (std::size_t i : path) {
        if (i >= (*cur)->children.size()) throw SchemaError("node_at: invalid path");
        cur = &(*cur)->children[i];
    }
    return *cur;
}

std::size_t count_nodes(const Plan& p) {
    std::size_t n = 0;
    for_each_node(p, [&](const Plan&, const NodePath&) { ++n; });
    return n;
}

std::size_t count_kind(const Plan& p, PlanKind kind) {
    std::size_t n = 0;
    for_each_node(p, [&](const Plan& node, const NodePath&) { n += node->kind == kind; });
    return n;
}

bool structurally_equal(const Plan& a, const Plan& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->table != b->table || a->attrs != b->attrs || !(a->target == b->target) ||
        !(a->source == b->source) || a->aggs != b->aggs || a->children.size() != b->children.size())
        return false;
    if (static_cast<bool>(a->expr) != static_cast<bool>(b->expr)) return false;
    if (a->expr && !structurally_equal(a->expr, b->expr)) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!structurally_equal(a->children[i], b->children[i])) return false;
    return true;
}

namespace {

class AlphaMatcher {
public:
    bool plans(const Plan& a, const Plan& b) {
        if (a->kind != b->kind || a->table != b->table || a->children.size() != b->children.size() ||
            a->aggs.size() != b->aggs.size() || static_cast<bool>(a->expr) != static_cast<bool>(b->expr))
            return false;
        for (std::size_t i = 0; i < a->children.size(); ++i)
            if (!plans(a->children[i], b->children[i])) return false;
        switch (a->kind) {
            case PlanKind::Map:
                if (!attr(a->target, b->target)) return false;
                break;
            case PlanKind::Rename:
                if (!attr(a->source, b->source) || !attr(a->target, b->target)) return false;
                break;
            case PlanKind::GroupBy:
                for (std::size_t i = 0; i < a->aggs.size(); ++i) {
                    const auto& x = a->aggs[i];
                    const auto& y = b->aggs[i];
                    if (x.fn.kind != y.fn.kind || x.fn.input.has_value() != y.fn.input.has_value()) return false;
                    if (x.fn.input && !attr(*x.fn.input, *y.fn.input)) return false;
                    if (!attr(x.output, y.output)) return false;
                }
                break;
            default: break;
        }
        if (!sets(a->attrs, b->attrs)) return false;
        if (a->expr && !exprs(a->expr, b->expr)) return false;
        return sets(a->schema, b->schema);
    }

private:
    bool attr(const Attribute& a, const Attribute& b) {
        auto f = forward_.find(a.id());
        auto r = backward_.find(b.id());
        if (f == forward_.end() && r == backward_.end()) {
            if (a.base() != b.base()) return false;
            forward_.emplace(a.id(), b.id());
            backward_.emplace(b.id(), a.id());
            return true;
        }
        return f != forward_.end() && r != backward_.end() && f->second == b.id() && r->second == a.id();
    }

    /// Known attributes must map onto each other; the rest pair up in id order.
    bool sets(const AttrSet& a, const AttrSet& b) {
        if (a.size() != b.size()) return false;
        std::vector<Attribute> unknown_a, unknown_b;
        for (const auto& x : a) {
            auto f = forward_.find(x.id());
            if (f == forward_.end()) {
                unknown_a.push_back(x);
                continue;
            }
            bool found = std::any_of(b.begin(), b.end(), [&](const Attribute& y) { return y.id() == f->second; });
            if (!found) return false;
        }
        for (const auto& y : b)
            if (!backward_.contains(y.id())) unknown_b.push_back(y);
        if (unknown_a.size() != unknown_b.size()) return false;
        for (std::size_t i = 0; i < unknown_a.size(); ++i)
            if (!attr(unknown_a[i], unknown_b[i])) return false;
        return true;
    }

    bool exprs(const ScalarExpr& a, const ScalarExpr& b) {
        if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
        if (a->kind == ExprKind::Attr) return attr(a->attr, b->attr);
        if (a->kind == ExprKind::Literal) return a->literal == b->literal;
        for (std::size_t i = 0; i < a->args.size(); ++i)
            if (!exprs(a->args[i], b->args[i])) return false;
        return true;
    }

    std::unordered_map<std::uint64_t, std::uint64_t> forward_;
    std::unordered_map<std::uint64_t, std::uint64_t> backward_;
};

} // namespace

bool alpha_equivalent(const Plan& a, const Plan& b) {
    AlphaMatcher m;
    return m.plans(a, b);
}

} // namespace decorr
