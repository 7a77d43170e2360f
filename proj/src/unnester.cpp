/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/unnester.hpp"

#include "decorr/errors.hpp"

#include <algorithm>

namespace decorr {

const char* to_string(PerfectMode mode) {
    switch (mode) {
        case PerfectMode::Auto: return "auto";
        case PerfectMode::Always: return "always";
        case PerfectMode::Never: return "never";
    }
    return "?";
}

int UnnestStats::max_visits() const {
    int m = 0;
    for (const auto& [node, n] : push_down_visits) m = std::max(m, n);
    return m;
}

UnnestingInfo make_unnesting_info(Plan domain) {
    UnnestingInfo info;
    info.outer_refs = schema_of(domain);
    for (const auto& d : info.outer_refs) info.rename_map.emplace(d, fresh_attribute(d.base()));
    info.domain = std::move(domain);
    return info;
}

ScalarExpr rewrite_columns(const UnnestingInfo& info, const ScalarExpr& e) {
    for (const auto& a : free_vars_expr(e))
        if (info.outer_refs.contains(a) && !info.rename_map.contains(a))
            throw UnnestError("no representative for outer attribute " + a.str());
    return substitute(e, info.rename_map);
}

UnnestingInfo collect_equivalences(UnnestingInfo info, const ScalarExpr& pred) {
    for (const auto& c : conjuncts(pred)) {
        if (c->kind != ExprKind::Eq) continue;
        for (int side = 0; side < 2; ++side) {
            const auto& outer = c->args[side];
            const auto& local = c->args[1 - side];
            if (outer->kind != ExprKind::Attr || !info.outer_refs.contains(outer->attr)) continue;
            if (intersects(free_vars_expr(local), info.outer_refs)) continue;
            info.equivalences.emplace(outer->attr, local);
        }
    }
    return info;
}

Plan compute_domain(const Plan& left, const AttrSet& right_free_vars) {
    if (!is_subset(right_free_vars, schema_of(left)))
        throw UnnestError("domain attributes " + format_attrs(right_free_vars) + " not produced by the left input");
    return plan::project_distinct(right_free_vars, left);
}

std::vector<NodePath> find_dependent_joins(const Plan& p) {
    std::vector<NodePath> out;
    for_each_node(p, [&](const Plan& n, const NodePath& path) {
        if (n->kind == PlanKind::DependentJoin && intersects(n->right()->free_vars, n->left()->schema))
            out.push_back(path);
    });
    return out;
}

Plan simple_djoin_elimination(const Plan& p) {
    std::vector<Plan> kids;
    bool changed = false;
    for (const auto& c : p->children) {
        kids.push_back(simple_djoin_elimination(c));
        changed |= kids.back() != c;
    }
    Plan node = changed ? plan::with_children(*p, std::move(kids)) : p;
    if (node->kind != PlanKind::DependentJoin || !intersects(node->right()->free_vars, node->left()->schema))
        return node;

    // Walk down the Select/Map spine of the right input.
    std::vector<const PlanNode*> spine;
    Plan rest = node->right();
    while (rest->kind == PlanKind::Select || rest->kind == PlanKind::Map) {
        spine.push_back(rest.get());
        rest = rest->child();
    }
    if (intersects(rest->free_vars, node->left()->schema)) return node;

    Plan out = plan::join(expr::true_literal(), node->left(), rest);
    for (auto it = spine.rbegin(); it != spine.rend(); ++it) {
        const PlanNode& op = **it;
        out = op.kind == PlanKind::Select ? plan::select(op.expr, out) : plan::map(op.target, op.expr, out);
    }
    if (!is_true_literal(node->expr)) out = plan::select(node->expr, out);
    return out;
}

namespace {

std::vector<ScalarExpr> domain_equalities(const AttrSet& attrs, const std::map<Attribute, Attribute>& left,
                                          const std::map<Attribute, Attribute>& right) {
    std::vector<ScalarExpr> out;
    for (const auto& d : attrs) out.push_back(expr::null_safe_eq(expr::col(left.at(d)), expr::col(right.at(d))));
    return out;
}

AttrSet representatives(const UnnestingInfo& info) {
    AttrSet out;
    for (const auto& [d, rep] : info.rename_map) out.insert(rep);
    return out;
}

/// Keeps only equivalences whose expression can be evaluated on available.
UnnestingInfo narrow(const UnnestingInfo& info, const AttrSet& available) {
    UnnestingInfo out = info;
    std::erase_if(out.equivalences, [&](const auto& e) { return !is_subset(free_vars_expr(e.second), available); });
    return out;
}

UnnestingInfo without_equivalences(const UnnestingInfo& info) {
    UnnestingInfo out = info;
    out.equivalences.clear();
    return out;
}

/// Same domain, new representative names (the d″ copy of a replicated domain).
UnnestingInfo fresh_copy(const UnnestingInfo& info) {
    UnnestingInfo out = info;
    for (auto& [d, rep] : out.rename_map) rep = fresh_attribute(d.base());
    return out;
}

class Unnester {
public:
    Unnester(const UnnestConfig& cfg, UnnestStats* stats) : cfg_(cfg), stats_(stats) {}

    /// Removes dependent joins from a subtree that does not depend on any domain.
    Plan rewrite(const Plan& p) {
        if (p->kind == PlanKind::DependentJoin) {
            Plan left = rewrite(p->left());
            AttrSet correlated = set_intersection(p->right()->free_vars, left->schema);
            if (correlated.empty()) return plan::join(p->expr, left, rewrite(p->right()));
            return decorrelate(*p, left, correlated);
        }
        std::vector<Plan> kids;
        bool changed = false;
        for (const auto& c : p->children) {
            kids.push_back(rewrite(c));
            changed |= kids.back() != c;
        }
        return changed ? plan::with_children(*p, std::move(kids)) : p;
    }

    Plan push_down(const UnnestingInfo& info, const Plan& t, int depth) {
        if (stats_) ++stats_->push_down_visits[t.get()];
        if (depth > cfg_.max_depth)
            throw UnnestError("nesting depth " + std::to_string(depth) + " exceeds limit " +
                              std::to_string(cfg_.max_depth));
        for (const auto& d : info.outer_refs)
            if (!info.rename_map.contains(d)) throw UnnestError("no representative for outer attribute " + d.str());

        if (!intersects(t->free_vars, info.outer_refs)) return stop(info, t);

        const PlanNode& n = *t;
        switch (n.kind) {
            case PlanKind::Select: {
                UnnestingInfo inner = collect_equivalences(info, n.expr);
                Plan c = push_down(narrow(inner, n.child()->schema), n.child(), depth);
                return plan::select(rewrite_columns(info, n.expr), c);
            }
            case PlanKind::Map: {
                Plan c = push_down(narrow(info, n.child()->schema), n.child(), depth);
                return plan::map(n.target, rewrite_columns(info, n.expr), c);
            }
            case PlanKind::ProjectDistinct:
            case PlanKind::Project: {
                Plan c = push_down(narrow(info, n.child()->schema), n.child(), depth);
                AttrSet attrs = set_union(n.attrs, representatives(info));
                return n.kind == PlanKind::Project ? plan::project(attrs, c) : plan::project_distinct(attrs, c);
            }
            case PlanKind::Rename:
                return plan::rename(n.target, n.source, push_down(narrow(info, n.child()->schema), n.child(), depth));
            case PlanKind::NullPad:
                return plan::null_pad(n.attrs, push_down(narrow(info, n.child()->schema), n.child(), depth));
            case PlanKind::GroupBy: {
                Plan c = push_down(narrow(info, n.child()->schema), n.child(), depth);
                return plan::group_by(set_union(n.attrs, representatives(info)), n.aggs, c);
            }
            case PlanKind::Union:
            case PlanKind::Intersect:
            case PlanKind::Except: {
                // Both inputs keep the same representatives so their schemas stay identical.
                Plan l = push_down(narrow(info, n.left()->schema), n.left(), depth);
                Plan r = push_down(narrow(info, n.right()->schema), n.right(), depth);
                return plan::with_children(n, {l, r});
            }
            case PlanKind::Cross:
            case PlanKind::Join: return push_down_join(info, n, depth);
            case PlanKind::SemiJoin:
            case PlanKind::AntiJoin:
            case PlanKind::OuterJoin: return push_down_derived_join(info, n, depth);
            case PlanKind::DependentJoin: return push_down_dependent_join(info, n, depth);
            case PlanKind::Scan: break;
        }
        throw UnnestError(std::string("no pushdown rule for ") + kind_name(n.kind));
    }

private:
    Plan decorrelate(const PlanNode& djoin, const Plan& left, const AttrSet& correlated) {
        UnnestingInfo info = make_unnesting_info(compute_domain(left, correlated));
        if (stats_) ++stats_->domains_built;
        Plan right = push_down(info, djoin.right(), 1);
        std::vector<ScalarExpr> parts = conjuncts(djoin.expr);
        std::map<Attribute, Attribute> identity;
        for (const auto& d : correlated) identity.emplace(d, d);
        for (auto& e : domain_equalities(correlated, identity, info.rename_map)) parts.push_back(std::move(e));
        return plan::project(djoin.schema, plan::join(conjunction(parts), left, right));
    }

    /// The subtree no longer depends on the domain: attach the domain values.
    Plan stop(const UnnestingInfo& info, const Plan& t) {
        Plan body = rewrite(t);
        bool covered = std::all_of(info.outer_refs.begin(), info.outer_refs.end(), [&](const Attribute& d) {
            auto it = info.equivalences.find(d);
            return it != info.equivalences.end() && is_subset(free_vars_expr(it->second), t->schema);
        });
        if (cfg_.perfect == PerfectMode::Always && !covered)
            throw UnnestError("perfect unnesting requested but no equivalence covers every attribute of " +
                              format_attrs(info.outer_refs));
        if (covered && cfg_.perfect != PerfectMode::Never) {
            if (stats_) ++stats_->perfect_stops;
            for (const auto& d : info.outer_refs) body = plan::map(info.rename_map.at(d), info.equivalences.at(d), body);
            return body;
        }
        if (stats_) ++stats_->join_stops;
        Plan domain = info.domain;
        for (const auto& d : info.outer_refs) domain = plan::rename(info.rename_map.at(d), d, domain);
        return plan::cross(domain, body);
    }

    Plan push_down_join(const UnnestingInfo& info, const PlanNode& n, int depth) {
        const bool left_dep = intersects(n.left()->free_vars, info.outer_refs);
        const bool right_dep = intersects(n.right()->free_vars, info.outer_refs);
        const bool is_cross = n.kind == PlanKind::Cross;
        auto rebuild = [&](ScalarExpr pred, Plan l, Plan r) {
            return is_cross ? plan::cross(std::move(l), std::move(r)) : plan::join(std::move(pred), std::move(l), std::move(r));
        };
        ScalarExpr pred = is_cross ? expr::true_literal() : rewrite_columns(info, n.expr);
        if (!right_dep)
            return rebuild(pred, push_down(narrow(info, n.left()->schema), n.left(), depth), rewrite(n.right()));
        if (!left_dep)
            return rebuild(pred, rewrite(n.left()), push_down(narrow(info, n.right()->schema), n.right(), depth));

        UnnestingInfo right_info = fresh_copy(info);
        Plan l = push_down(narrow(info, n.left()->schema), n.left(), depth);
        Plan r = push_down(narrow(right_info, n.right()->schema), n.right(), depth);
        std::vector<ScalarExpr> parts = conjuncts(pred);
        for (auto& e : domain_equalities(info.outer_refs, info.rename_map, right_info.rename_map))
            parts.push_back(std::move(e));
        return plan::project(set_union(n.schema, representatives(info)), plan::join(conjunction(parts), l, r));
    }

    Plan push_down_derived_join(const UnnestingInfo& info, const PlanNode& n, int depth) {
        ScalarExpr pred = rewrite_columns(info, n.expr);
        Plan l = push_down(narrow(info, n.left()->schema), n.left(), depth);
        if (!intersects(n.right()->free_vars, info.outer_refs))
            return plan::with_children(*plan::with_expr(n, pred), {l, rewrite(n.right())});

        UnnestingInfo right_info = fresh_copy(without_equivalences(info));
        Plan r = push_down(right_info, n.right(), depth);
        std::vector<ScalarExpr> parts = conjuncts(pred);
        for (auto& e : domain_equalities(info.outer_refs, info.rename_map, right_info.rename_map))
            parts.push_back(std::move(e));
        ScalarExpr cond = conjunction(parts);
        switch (n.kind) {
            case PlanKind::SemiJoin: return plan::semi_join(cond, l, r);
            case PlanKind::AntiJoin: return plan::anti_join(cond, l, r);
            default:
                return plan::project(set_union(n.schema, representatives(info)), plan::outer_join(cond, l, r));
        }
    }

    /// A dependent join below the domain: push the domain into the left input,
    /// then decorrelate the right input against a new domain over the result.
    Plan push_down_dependent_join(const UnnestingInfo& info, const PlanNode& n, int depth) {
        Plan l = push_down(narrow(info, n.left()->schema), n.left(), depth);
        ScalarExpr pred = rewrite_columns(info, n.expr);
        AttrSet correlated =
            set_intersection(n.right()->free_vars, set_union(n.left()->schema, info.outer_refs));
        if (correlated.empty()) return plan::join(pred, l, rewrite(n.right()));

        // Columns of the new domain, as seen by the right input; outer attributes
        // are read from their representative in l and renamed back.
        std::map<Attribute, Attribute> source;
        AttrSet source_attrs;
        for (const auto& f : correlated) {
            Attribute s = info.outer_refs.contains(f) ? info.rename_map.at(f) : f;
            source.emplace(f, s);
            source_attrs.insert(s);
        }
        Plan domain = compute_domain(l, source_attrs);
        for (const auto& f : correlated)
            if (info.outer_refs.contains(f)) domain = plan::rename(f, source.at(f), domain);

        UnnestingInfo inner = make_unnesting_info(domain);
        if (stats_) ++stats_->domains_built;
        Plan r = push_down(inner, n.right(), depth + 1);
        std::vector<ScalarExpr> parts = conjuncts(pred);
        for (auto& e : domain_equalities(correlated, source, inner.rename_map)) parts.push_back(std::move(e));
        return plan::project(set_union(n.schema, representatives(info)), plan::join(conjunction(parts), l, r));
    }

    const UnnestConfig& cfg_;
    UnnestStats* stats_;
};

} // namespace

Plan push_down(const UnnestingInfo& info, const Plan& subtree, const UnnestConfig& cfg, UnnestStats* stats) {
    if (!info.domain || schema_of(info.domain) != info.outer_refs)
        throw UnnestError("unnesting info: domain schema must equal the outer references");
    Unnester u(cfg, stats);
    return u.push_down(info, subtree, 1);
}

Plan unnest(const Plan& p, const UnnestConfig& cfg, UnnestStats* stats) {
    if (cfg.max_depth < 1) throw UnnestError("max_depth must be positive");
    Unnester u(cfg, stats);
    Plan out = u.rewrite(simple_djoin_elimination(p));
    if (count_kind(out, PlanKind::DependentJoin) != 0) throw UnnestError("dependent join survived unnesting");
    return out;
}

} // namespace decorr
