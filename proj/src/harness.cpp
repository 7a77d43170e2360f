/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/harness.hpp"

#include "decorr/errors.hpp"
#include "decorr/plan_text.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <functional>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>

namespace decorr {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t Rng::below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

int Rng::between(int lo, int hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1)));
}

bool Rng::chance(int percent) { return static_cast<int>(below(100)) < percent; }

namespace {

Relation random_relation(const GenSpec& spec, const AttrSet& schema, std::uint64_t seed, bool duplicate_free,
                         int min_rows) {
    Rng rng(seed);
    Relation rel(schema);
    const int rows = spec.max_rows > 0 ? rng.between(std::min(min_rows, spec.max_rows), spec.max_rows) : 0;
    for (int i = 0; i < rows; ++i) {
        Relation::Row row;
        for (std::size_t c = 0; c < schema.size(); ++c) row.push_back(rng.pick(spec.value_pool));
        const std::uint64_t n = duplicate_free ? 1 : static_cast<std::uint64_t>(rng.between(1, std::max(1, spec.max_count)));
        if (rel.count_row(row) == 0) rel.add_row(std::move(row), n);
    }
    return rel;
}

} // namespace

Relation gen_relation(const GenSpec& spec, const AttrSet& schema, std::uint64_t seed, bool duplicate_free) {
    return random_relation(spec, schema, seed, duplicate_free, 0);
}

std::optional<std::string> check_equivalence(const Plan& p1, const Plan& p2, const Catalog& cat) {
    Relation r1, r2;
    try {
        r1 = evaluate(p1, cat);
    } catch (const std::exception& e) {
        return std::string("left plan failed: ") + e.what();
    }
    try {
        r2 = evaluate(p2, cat);
    } catch (const std::exception& e) {
        return std::string("right plan failed: ") + e.what();
    }
    if (r1.columns() != r2.columns())
        return "schema mismatch: " + format_attrs(r1.schema()) + " vs " + format_attrs(r2.schema());
    if (auto d = first_difference(r1, r2)) return d->str();
    return std::nullopt;
}

const char* to_string(Mutation m) {
    switch (m) {
        case Mutation::None: return "none";
        case Mutation::DropDomainReplication: return "drop-domain-replication";
        case Mutation::DropNaturalEquality: return "drop-natural-equality";
        case Mutation::ThreeValuedDomainEquality: return "three-valued-domain-equality";
    }
    return "?";
}

namespace {

std::string print_catalog(const Catalog& cat) {
    std::string out;
    for (const auto& [name, rel] : cat) out += "table " + name + " " + print_relation(rel) + "\n";
    return out;
}

/// Generation state for one trial.
struct Ctx {
    Ctx(const GenSpec& s, std::uint64_t seed) : spec(s), rng(seed) {}

    const GenSpec& spec;
    Rng rng;
    Catalog cat;
    int tables = 0;
    /// Generated plans use non-empty base tables; emptiness arises from the operators.
    int min_rows = 0;

    Plan add_table(const std::string& name, const AttrSet& attrs, bool duplicate_free = false) {
        cat[name] = random_relation(spec, attrs, rng.next(), duplicate_free, min_rows);
        return plan::scan(name, attrs);
    }

    AttrSet new_attrs(int n, const std::string& tag) {
        AttrSet out;
        for (int i = 0; i < n; ++i) out.insert(fresh_attribute(std::string(1, static_cast<char>('a' + i)) + tag));
        return out;
    }

    int arity() { return rng.between(1, std::max(1, spec.max_arity)); }

    /// A fresh table with a random arity.
    Plan new_scan(const std::string& prefix = "t") {
        std::string name = prefix + std::to_string(tables++);
        return add_table(name, new_attrs(arity(), std::to_string(tables - 1)));
    }

    ScalarExpr literal() { return expr::lit(rng.pick(spec.value_pool)); }

    /// A pool value, rarely NULL: a NULL constant makes most comparisons unknown.
    ScalarExpr constant() {
        for (int i = 0; i < 3; ++i) {
            const Value& v = rng.pick(spec.value_pool);
            if (!v.is_null()) return expr::lit(v);
        }
        return literal();
    }

    ScalarExpr operand(const std::vector<Attribute>& attrs) {
        if (attrs.empty() || rng.chance(20)) return constant();
        return expr::col(rng.pick(attrs));
    }

    ScalarExpr arith(const std::vector<Attribute>& attrs) {
        ScalarExpr l = operand(attrs);
        if (rng.chance(65)) return l;
        static const std::vector<ExprKind> ops{ExprKind::Add, ExprKind::Sub, ExprKind::Mul};
        return expr::make(rng.pick(ops), {l, operand(attrs)});
    }

    ScalarExpr comparison(ScalarExpr l, ScalarExpr r) {
        static const std::vector<ExprKind> ops{ExprKind::Eq, ExprKind::Eq, ExprKind::Ne, ExprKind::Ne,
                                               ExprKind::Lt, ExprKind::Le, ExprKind::Le, ExprKind::Gt,
                                               ExprKind::Ge, ExprKind::Ge};
        return expr::make(rng.pick(ops), {std::move(l), std::move(r)});
    }

    ScalarExpr atom(const std::vector<Attribute>& attrs) {
        if (!attrs.empty() && rng.chance(10)) return expr::is_null(expr::col(rng.pick(attrs)));
        return comparison(operand(attrs), arith(attrs));
    }

    /// Random predicate over attrs; when must is non-empty the first conjunct
    /// references one of its attributes.
    ScalarExpr predicate(const AttrSet& scope, const AttrSet& must = {}) {
        std::vector<Attribute> attrs = to_vector(scope);
        std::vector<ScalarExpr> parts;
        if (!must.empty()) {
            ScalarExpr d = expr::col(rng.pick(to_vector(must)));
            ScalarExpr first = rng.chance(50) ? expr::eq(d, operand(attrs)) : comparison(d, operand(attrs));
            if (rng.chance(25)) first = expr::or_({expr::is_null(first->args[0]), first});
            parts.push_back(first);
        } else {
            parts.push_back(atom(attrs));
        }
        if (rng.chance(20)) parts.push_back(atom(attrs));
        ScalarExpr p = parts.size() == 1 ? parts[0] : expr::and_(parts);
        if (rng.chance(25)) p = expr::or_({p, atom(attrs)});
        if (rng.chance(8)) p = expr::not_(p);
        return p;
    }

    std::vector<Aggregate> aggregates(const AttrSet& input) {
        static const std::vector<AggKind> kinds{AggKind::CountStar, AggKind::Count, AggKind::Sum, AggKind::Min,
                                                AggKind::Max};
        std::vector<Aggregate> out;
        std::vector<Attribute> attrs = to_vector(input);
        const int n = rng.between(1, 2);
        for (int i = 0; i < n; ++i) {
            Aggregate a;
            a.output = fresh_attribute("g");
            a.fn.kind = attrs.empty() ? AggKind::CountStar : rng.pick(kinds);
            if (a.fn.kind != AggKind::CountStar) a.fn.input = rng.pick(attrs);
            out.push_back(std::move(a));
        }
        return out;
    }

    AttrSet subset(const AttrSet& s, bool non_empty) {
        AttrSet out;
        for (const auto& a : s)
            if (rng.chance(50)) out.insert(a);
        if (non_empty && out.empty() && !s.empty()) out.insert(rng.pick(to_vector(s)));
        return out;
    }
};

// ---------------------------------------------------------------- equivalence suites

struct Case {
    Case() = default;
    Case(Plan l, Plan r) : left(std::move(l)), right(std::move(r)) {}

    Plan left;
    Plan right;
    /// When set, left is compared with this relation instead of right.
    std::optional<Relation> oracle;
    /// Only m_left(x) > 0 ⇒ m_right(x) = m_left(x) is required.
    bool one_sided = false;
};

Plan dj(const Plan& d, const Plan& x) { return plan::dependent_join(expr::true_literal(), d, x); }

/// Joins l and r on their shared attributes: the shared columns of r are
/// renamed to fresh names, compared with null-safe equality, and projected away.
Plan natural_join(PlanKind kind, const ScalarExpr& pred, const Plan& l, const Plan& r, const AttrSet& common,
                  Mutation m) {
    std::vector<ScalarExpr> parts = conjuncts(pred);
    Plan renamed = r;
    for (const auto& c : common) {
        Attribute c2 = fresh_attribute(c.base());
        renamed = plan::rename(c2, c, renamed);
        if (m == Mutation::DropNaturalEquality) continue;
        parts.push_back(m == Mutation::ThreeValuedDomainEquality ? expr::eq(expr::col(c), expr::col(c2))
                                                                 : expr::null_safe_eq(expr::col(c), expr::col(c2)));
    }
    ScalarExpr cond = conjunction(parts);
    const AttrSet out = set_union(schema_of(l), schema_of(r));
    switch (kind) {
        case PlanKind::SemiJoin: return plan::semi_join(cond, l, renamed);
        case PlanKind::AntiJoin: return plan::anti_join(cond, l, renamed);
        case PlanKind::OuterJoin: return plan::project(out, plan::outer_join(cond, l, renamed));
        default: return plan::project(out, plan::join(cond, l, renamed));
    }
}

Plan binary(PlanKind kind, const ScalarExpr& pred, const Plan& l, const Plan& r) {
    switch (kind) {
        case PlanKind::Union: return plan::set_union(l, r);
        case PlanKind::Intersect: return plan::intersect(l, r);
        case PlanKind::Except: return plan::except(l, r);
        case PlanKind::Cross: return plan::cross(l, r);
        case PlanKind::Join: return plan::join(pred, l, r);
        case PlanKind::DependentJoin: return plan::dependent_join(pred, l, r);
        case PlanKind::SemiJoin: return plan::semi_join(pred, l, r);
        case PlanKind::AntiJoin: return plan::anti_join(pred, l, r);
        case PlanKind::OuterJoin: return plan::outer_join(pred, l, r);
        default: throw std::logic_error("not a binary operator");
    }
}

struct Domain {
    Plan plan;
    AttrSet attrs;
};

Domain new_domain(Ctx& ctx) {
    AttrSet attrs;
    const int n = ctx.rng.between(1, std::min(2, std::max(1, ctx.spec.max_arity)));
    for (int i = 0; i < n; ++i) attrs.insert(fresh_attribute("d" + std::to_string(i + 1)));
    return {ctx.add_table("D", attrs, true), attrs};
}

/// A relational expression over a fresh base table whose free variables are
/// drawn from outer. With dependent set it references at least one of them.
/// Some shapes let NULL outer values through, so NULL domain rows matter.
Plan correlated(Ctx& ctx, const std::string& name, const AttrSet& outer, bool dependent,
                const std::optional<AttrSet>& schema = std::nullopt, bool allow_map = true) {
    AttrSet attrs = schema ? *schema : ctx.new_attrs(ctx.arity(), name.substr(1));
    Plan base = ctx.add_table(name, attrs);
    std::vector<Attribute> local = to_vector(attrs);
    if (!dependent || outer.empty()) {
        if (ctx.rng.chance(40)) return plan::select(ctx.predicate(attrs), base);
        return base;
    }
    std::vector<Attribute> outs = to_vector(outer);
    const Attribute d = ctx.rng.pick(outs);
    const Attribute a = ctx.rng.pick(local);
    switch (ctx.rng.below(allow_map ? 5 : 3)) {
        case 0: return plan::select(ctx.predicate(set_union(attrs, outer), {d}), base);
        case 1:
            return plan::select(expr::or_({expr::is_null(expr::col(d)), ctx.comparison(expr::col(d), expr::col(a))}),
                                base);
        case 2: return plan::select(expr::eq(expr::col(a), expr::col(d)), base);
        case 3: return plan::map(fresh_attribute("m"), expr::add(expr::col(d), ctx.operand(local)), base);
        default: {
            Attribute m = fresh_attribute("m");
            Plan mapped = plan::map(m, expr::mul(expr::col(d), expr::col(a)), base);
            return plan::select(ctx.comparison(expr::col(m), ctx.operand(to_vector(set_union(attrs, outer)))), mapped);
        }
    }
}

Case djoin_of_independent_inputs(Ctx& ctx, Mutation) {
    Plan r1 = correlated(ctx, "R1", {}, false);
    Plan r2 = correlated(ctx, "R2", {}, false);
    ScalarExpr p = ctx.rng.chance(25) ? expr::true_literal()
                                      : ctx.predicate(set_union(schema_of(r1), schema_of(r2)));
    return {plan::dependent_join(p, r1, r2), plan::join(p, r1, r2)};
}

/// Natural join checked against a direct computation of m_R1(x|A(R1)) · m_R2(x|A(R2)).
Case natural_join_counts(Ctx& ctx, Mutation m) {
    AttrSet common = ctx.new_attrs(ctx.rng.between(1, 2), "c");
    AttrSet own1, own2;
    if (ctx.rng.chance(70)) own1.insert(fresh_attribute("x"));
    if (ctx.rng.chance(70)) own2.insert(fresh_attribute("y"));
    Plan r1 = ctx.add_table("R1", set_union(common, own1));
    Plan r2 = ctx.add_table("R2", set_union(common, own2));
    const Relation& t1 = ctx.cat.at("R1");
    const Relation& t2 = ctx.cat.at("R2");
    Relation expected(set_union(schema_of(r1), schema_of(r2)));
    for (const auto& [row1, n1] : t1.rows()) {
        Tuple x1 = t1.tuple(row1);
        for (const auto& [row2, n2] : t2.rows()) {
            Tuple x2 = t2.tuple(row2);
            if (tuple_restrict(x1, common) != tuple_restrict(x2, common)) continue;
            expected.add(tuple_concat(x1, tuple_restrict(x2, own2)), n1 * n2);
        }
    }
    Case c;
    c.left = natural_join(PlanKind::Join, expr::true_literal(), r1, r2, common, m);
    c.oracle = std::move(expected);
    return c;
}

/// σ_{d=a}(D × R) against σ_{d=a}(χ_{d:a}(R)).
Case equality_as_map(Ctx& ctx, Mutation) {
    Attribute d = fresh_attribute("d");
    Plan dom = ctx.add_table("D", {d}, true);
    Plan r = ctx.add_table("R", ctx.new_attrs(ctx.arity(), "r"));
    Attribute a = ctx.rng.pick(to_vector(schema_of(r)));
    ScalarExpr p = expr::eq(expr::col(d), expr::col(a));
    Case c;
    c.left = plan::select(p, plan::cross(dom, r));
    c.right = plan::select(p, plan::map(d, expr::col(a), r));
    c.one_sided = true;
    return c;
}

Case push_projection(Ctx& ctx, Mutation, bool distinct) {
    Domain dom = new_domain(ctx);
    Plan r = correlated(ctx, "R", dom.attrs, true);
    AttrSet keep = ctx.subset(schema_of(r), true);
    AttrSet wide = set_union(keep, dom.attrs);
    if (distinct) return {dj(dom.plan, plan::project_distinct(keep, r)), plan::project_distinct(wide, dj(dom.plan, r))};
    return {dj(dom.plan, plan::project(keep, r)), plan::project(wide, dj(dom.plan, r))};
}

Case push_set_op(Ctx& ctx, Mutation, PlanKind kind) {
    Domain dom = new_domain(ctx);
    AttrSet attrs = ctx.new_attrs(ctx.arity(), "r");
    const int which = ctx.rng.between(0, 2);  // 0: both dependent, 1: left only, 2: right only
    Plan r1 = correlated(ctx, "R1", dom.attrs, which != 2, attrs, false);
    Plan r2 = correlated(ctx, "R2", dom.attrs, which != 1, attrs, false);
    return {dj(dom.plan, binary(kind, nullptr, r1, r2)),
            binary(kind, nullptr, dj(dom.plan, r1), dj(dom.plan, r2))};
}

Case push_select(Ctx& ctx, Mutation) {
    Domain dom = new_domain(ctx);
    Plan r = correlated(ctx, "R", dom.attrs, ctx.rng.chance(50));
    ScalarExpr p = ctx.predicate(set_union(schema_of(r), dom.attrs), dom.attrs);
    return {dj(dom.plan, plan::select(p, r)), plan::select(p, dj(dom.plan, r))};
}

Case push_map(Ctx& ctx, Mutation) {
    Domain dom = new_domain(ctx);
    Plan r = correlated(ctx, "R", dom.attrs, ctx.rng.chance(50));
    Attribute a = fresh_attribute("f");
    std::vector<Attribute> scope = to_vector(set_union(schema_of(r), dom.attrs));
    ScalarExpr f = expr::add(expr::col(ctx.rng.pick(to_vector(dom.attrs))), ctx.arith(scope));
    return {dj(dom.plan, plan::map(a, f, r)), plan::map(a, f, dj(dom.plan, r))};
}

/// Cross or join with exactly one dependent side.
Case push_one_sided(Ctx& ctx, Mutation, PlanKind kind) {
    Domain dom = new_domain(ctx);
    const bool left_dependent = ctx.rng.chance(50);
    Plan r1 = correlated(ctx, "R1", dom.attrs, left_dependent);
    Plan r2 = correlated(ctx, "R2", dom.attrs, !left_dependent);
    ScalarExpr p = kind == PlanKind::Join
                       ? ctx.predicate(set_union(set_union(schema_of(r1), schema_of(r2)), dom.attrs))
                       : nullptr;
    Plan right = left_dependent ? binary(kind, p, dj(dom.plan, r1), r2) : binary(kind, p, r1, dj(dom.plan, r2));
    return {dj(dom.plan, binary(kind, p, r1, r2)), right};
}

/// Cross or join with both sides dependent: D is replicated and joined back.
Case push_both_sides(Ctx& ctx, Mutation m, PlanKind kind) {
    Domain dom = new_domain(ctx);
    Plan r1 = correlated(ctx, "R1", dom.attrs, true);
    Plan r2 = correlated(ctx, "R2", dom.attrs, true);
    ScalarExpr p = kind == PlanKind::Join
                       ? ctx.predicate(set_union(set_union(schema_of(r1), schema_of(r2)), dom.attrs))
                       : expr::true_literal();
    Plan left = dj(dom.plan, binary(kind, p, r1, r2));
    if (m == Mutation::DropDomainReplication) return {left, binary(kind, p, dj(dom.plan, r1), r2)};
    return {left, natural_join(PlanKind::Join, p, dj(dom.plan, r1), dj(dom.plan, r2), dom.attrs, m)};
}

Case push_group_by(Ctx& ctx, Mutation) {
    Domain dom = new_domain(ctx);
    Plan r = correlated(ctx, "R", dom.attrs, true);
    AttrSet keys = ctx.subset(schema_of(r), false);
    std::vector<Aggregate> aggs = ctx.aggregates(schema_of(r));
    return {dj(dom.plan, plan::group_by(keys, aggs, r)),
            plan::group_by(set_union(keys, dom.attrs), aggs, dj(dom.plan, r))};
}

/// Semi, anti and outer joins: the general two-sided form, or the one-sided
/// form when the right input does not depend on D.
Case push_derived_join(Ctx& ctx, Mutation m, PlanKind kind) {
    Domain dom = new_domain(ctx);
    const bool right_dependent = ctx.rng.chance(60);
    Plan r1 = correlated(ctx, "R1", dom.attrs, true);
    Plan r2 = correlated(ctx, "R2", dom.attrs, right_dependent);
    ScalarExpr p = ctx.predicate(set_union(set_union(schema_of(r1), schema_of(r2)), dom.attrs));
    Plan left = dj(dom.plan, binary(kind, p, r1, r2));
    if (!right_dependent && ctx.rng.chance(50)) return {left, binary(kind, p, dj(dom.plan, r1), r2)};
    return {left, natural_join(kind, p, dj(dom.plan, r1), dj(dom.plan, r2), dom.attrs, m)};
}

Case push_dependent_join(Ctx& ctx, Mutation) {
    Domain dom = new_domain(ctx);
    Plan r1 = correlated(ctx, "R1", dom.attrs, true);
    AttrSet inner_outer = ctx.rng.chance(50) ? schema_of(r1) : set_union(schema_of(r1), dom.attrs);
    Plan r2 = correlated(ctx, "R2", inner_outer, true);
    ScalarExpr p = ctx.rng.chance(30)
                       ? expr::true_literal()
                       : ctx.predicate(set_union(set_union(schema_of(r1), schema_of(r2)), dom.attrs));
    return {dj(dom.plan, plan::dependent_join(p, r1, r2)), plan::dependent_join(p, dj(dom.plan, r1), r2)};
}

/// R1 ▶_p R2 against R1 ⋈_{p ∧ natural} (D ▶ R2), with D = Π_{F(R2)}(R1) or,
/// when superset is set, a duplicate-free table strictly containing it.
Case decorrelate_via_domain(Ctx& ctx, Mutation m, bool superset) {
    Plan r1 = correlated(ctx, "R1", {}, false);
    AttrSet ad = ctx.subset(schema_of(r1), true);
    Plan r2 = correlated(ctx, "R2", ad, true);
    // The D columns are exactly F(R2).
    ad = set_intersection(ad, free_vars_plan(r2));
    ScalarExpr p = ctx.rng.chance(30) ? expr::true_literal()
                                      : ctx.predicate(set_union(schema_of(r1), schema_of(r2)));
    Plan domain = plan::project_distinct(ad, r1);
    if (superset) {
        Relation rel = evaluate(domain, ctx.cat);
        const std::size_t before = rel.distinct_size();
        std::vector<Value> pool = ctx.spec.value_pool;
        pool.push_back(Value(7));
        const int extra = ctx.rng.between(1, 3);
        for (int i = 0; i < extra || rel.distinct_size() == before; ++i) {
            Relation::Row row;
            for (std::size_t c = 0; c < ad.size(); ++c) row.push_back(i >= extra ? Value(7) : ctx.rng.pick(pool));
            if (rel.count_row(row) == 0) rel.add_row(row);
        }
        ctx.cat["D"] = std::move(rel);
        domain = plan::scan("D", ad);
    }
    return {plan::dependent_join(p, r1, r2), natural_join(PlanKind::Join, p, r1, dj(domain, r2), ad, m)};
}

using CaseBuilder = std::function<Case(Ctx&, Mutation)>;

const std::vector<std::pair<std::string, CaseBuilder>>& builders() {
    using namespace std::placeholders;
    static const std::vector<std::pair<std::string, CaseBuilder>> all{
        {"L3.1", djoin_of_independent_inputs},
        {"L3.2", natural_join_counts},
        {"L4.2", equality_as_map},
        {"L4.3", [](Ctx& c, Mutation m) { return push_projection(c, m, true); }},
        {"L4.4", [](Ctx& c, Mutation m) { return push_projection(c, m, false); }},
        {"L4.5", [](Ctx& c, Mutation m) { return push_set_op(c, m, PlanKind::Union); }},
        {"L4.6", [](Ctx& c, Mutation m) { return push_set_op(c, m, PlanKind::Intersect); }},
        {"L4.7", [](Ctx& c, Mutation m) { return push_set_op(c, m, PlanKind::Except); }},
        {"L4.8", push_select},
        {"L4.9", push_map},
        {"L4.10", [](Ctx& c, Mutation m) { return push_one_sided(c, m, PlanKind::Cross); }},
        {"L4.11", [](Ctx& c, Mutation m) { return push_one_sided(c, m, PlanKind::Join); }},
        {"L4.12", [](Ctx& c, Mutation m) { return push_both_sides(c, m, PlanKind::Cross); }},
        {"L4.13", [](Ctx& c, Mutation m) { return push_both_sides(c, m, PlanKind::Join); }},
        {"L4.14", push_group_by},
        {"L4.15", [](Ctx& c, Mutation m) { return push_derived_join(c, m, PlanKind::SemiJoin); }},
        {"L4.16", [](Ctx& c, Mutation m) { return push_derived_join(c, m, PlanKind::AntiJoin); }},
        {"L4.17", [](Ctx& c, Mutation m) { return push_derived_join(c, m, PlanKind::OuterJoin); }},
        {"L4.18", push_dependent_join},
        {"T4.1", [](Ctx& c, Mutation m) { return decorrelate_via_domain(c, m, false); }},
        {"T4.1+", [](Ctx& c, Mutation m) { return decorrelate_via_domain(c, m, true); }},
    };
    return all;
}

const CaseBuilder& builder_for(const std::string& id) {
    for (const auto& [name, b] : builders())
        if (name == id) return b;
    throw std::invalid_argument("unknown suite '" + id + "'");
}

std::optional<std::string> one_sided_difference(const Relation& t1, const Relation& t2) {
    if (t1.columns() != t2.columns()) return "schema mismatch";
    for (const auto& [row, n] : t1.rows())
        if (t2.count_row(row) != n)
            return "tuple " + t1.tuple(row).str() + ": left count " + std::to_string(n) + ", right count " +
                   std::to_string(t2.count_row(row));
    return std::nullopt;
}

std::optional<TrialFailure> suite_trial(const std::string& id, const CaseBuilder& build, const GenSpec& spec,
                                        std::uint64_t seed, Mutation mutation) {
    Ctx ctx(spec, seed);
    TrialFailure f;
    f.seed = seed;
    f.suite = id;
    f.max_rows = spec.max_rows;
    f.max_plan_depth = spec.max_plan_depth;
    Case c;
    try {
        c = build(ctx, mutation);
    } catch (const std::exception& e) {
        f.inputs = print_catalog(ctx.cat);
        f.diff = std::string("could not build the rewritten plan: ") + e.what();
        return f;
    }
    f.left_plan = print_plan(c.left);
    if (c.right) f.right_plan = print_plan(c.right);
    f.inputs = print_catalog(ctx.cat);
    std::optional<std::string> diff;
    if (c.oracle) {
        try {
            Relation got = evaluate(c.left, ctx.cat);
            if (got.columns() != c.oracle->columns()) diff = "schema mismatch";
            else if (auto d = first_difference(got, *c.oracle)) diff = d->str();
            f.right_plan = print_relation(*c.oracle);
        } catch (const std::exception& e) {
            diff = std::string("evaluation failed: ") + e.what();
        }
    } else if (c.one_sided) {
        try {
            diff = one_sided_difference(evaluate(c.left, ctx.cat), evaluate(c.right, ctx.cat));
        } catch (const std::exception& e) {
            diff = std::string("evaluation failed: ") + e.what();
        }
    } else {
        diff = check_equivalence(c.left, c.right, ctx.cat);
    }
    if (!diff) return std::nullopt;
    f.diff = *diff;
    return f;
}

/// Re-runs a failing trial with smaller bounds and keeps the smallest failure.
template <class Trial>
TrialFailure shrink(TrialFailure failure, const GenSpec& spec, Trial&& trial) {
    GenSpec s = spec;
    while (s.max_rows > 0) {
        GenSpec t = s;
        --t.max_rows;
        auto f = trial(t);
        if (!f) break;
        s = t;
        failure = *f;
    }
    while (s.max_plan_depth > 1) {
        GenSpec t = s;
        --t.max_plan_depth;
        auto f = trial(t);
        if (!f) break;
        s = t;
        failure = *f;
    }
    return failure;
}

/// Runs fn(i) for every trial index on `jobs` threads; results are kept in index order.
std::vector<std::optional<TrialFailure>> run_trials(std::size_t trials, int jobs,
                                                    const std::function<std::optional<TrialFailure>(std::size_t)>& fn) {
    std::vector<std::optional<TrialFailure>> results(trials);
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), 1, std::max<std::size_t>(1, trials));
    if (workers == 1) {
        for (std::size_t i = 0; i < trials; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < trials; i = next++) results[i] = fn(i);
        });
    for (auto& t : pool) t.join();
    return results;
}

EquivalenceReport collect(std::string suite, std::size_t trials, std::vector<std::optional<TrialFailure>> results) {
    EquivalenceReport r;
    r.suite = std::move(suite);
    r.trials = trials;
    for (auto& f : results)
        if (f) r.failures.push_back(std::move(*f));
    return r;
}

// ---------------------------------------------------------------- plan generator

class PlanGen {
public:
    PlanGen(Ctx& ctx) : ctx_(ctx) {}

    Plan generate() {
        djoins_left_ = ctx_.spec.max_dependent_joins;
        extra_leaves_ = 4;
        return gen(ctx_.spec.max_plan_depth, {});
    }

    /// Wraps p in a selection that references one of must.
    Plan correlate(const Plan& p, const AttrSet& must, const AttrSet& outer) {
        return plan::select(ctx_.predicate(set_union(schema_of(p), outer), must), p);
    }

    Plan leaf(const AttrSet& outer) {
        Plan s = ctx_.new_scan();
        if (outer.empty() || !ctx_.rng.chance(35)) return s;
        if (ctx_.rng.chance(50)) return correlate(s, outer, outer);
        // Equalities with local columns: the shape that allows maps instead of a domain join.
        std::vector<ScalarExpr> eqs;
        const std::vector<Attribute> local = to_vector(schema_of(s));
        for (const auto& d : ctx_.subset(outer, true))
            eqs.push_back(expr::eq(expr::col(ctx_.rng.pick(local)), expr::col(d)));
        return plan::select(conjunction(eqs), s);
    }

private:
    Plan gen(int depth, const AttrSet& outer) {
        if (depth <= 0 || ctx_.rng.chance(12)) return leaf(outer);
        std::vector<PlanKind> kinds{PlanKind::Select,  PlanKind::Map,    PlanKind::Project, PlanKind::ProjectDistinct,
                                    PlanKind::Rename,  PlanKind::NullPad, PlanKind::GroupBy, PlanKind::GroupBy};
        if (extra_leaves_ > 0) {
            for (PlanKind k : {PlanKind::Union, PlanKind::Intersect, PlanKind::Except, PlanKind::Cross, PlanKind::Join,
                               PlanKind::SemiJoin, PlanKind::AntiJoin, PlanKind::OuterJoin})
                kinds.push_back(k);
            if (djoins_left_ > 0)
                for (int i = 0; i < 6; ++i) kinds.push_back(PlanKind::DependentJoin);
        }
        const PlanKind kind = ctx_.rng.pick(kinds);
        if (is_binary(kind)) {
            --extra_leaves_;
            if (kind == PlanKind::DependentJoin) --djoins_left_;
            return gen_binary(kind, depth, outer);
        }
        Plan c = gen(depth - 1, outer);
        const AttrSet& a = schema_of(c);
        switch (kind) {
            case PlanKind::Select: return plan::select(ctx_.predicate(set_union(a, outer)), c);
            case PlanKind::Map:
                return plan::map(fresh_attribute("m"), ctx_.arith(to_vector(set_union(a, outer))), c);
            case PlanKind::Project: return plan::project(ctx_.subset(a, true), c);
            case PlanKind::ProjectDistinct: return plan::project_distinct(ctx_.subset(a, true), c);
            case PlanKind::Rename: {
                Attribute from = ctx_.rng.pick(to_vector(a));
                return plan::rename(fresh_attribute(from.base() + "r"), from, c);
            }
            case PlanKind::NullPad: {
                AttrSet pad{fresh_attribute("n")};
                if (ctx_.rng.chance(30)) pad.insert(fresh_attribute("n"));
                return plan::null_pad(pad, c);
            }
            default: return plan::group_by(ctx_.subset(a, false), ctx_.aggregates(a), c);
        }
    }

    Plan gen_binary(PlanKind kind, int depth, const AttrSet& outer) {
        Plan l = gen(depth - 1, outer);
        if (kind == PlanKind::DependentJoin) {
            const AttrSet bound = set_union(outer, schema_of(l));
            Plan r = gen(depth - 1, bound);
            if (!intersects(free_vars_plan(r), schema_of(l))) r = correlate(r, schema_of(l), bound);
            ScalarExpr p = ctx_.rng.chance(60)
                               ? expr::true_literal()
                               : ctx_.predicate(set_union(set_union(schema_of(l), schema_of(r)), outer));
            return plan::dependent_join(p, l, r);
        }
        Plan r = gen(depth - 1, outer);
        if (is_set_operation(kind)) return binary(kind, nullptr, l, conform(r, schema_of(l), outer));
        ScalarExpr p = ctx_.predicate(set_union(set_union(schema_of(l), schema_of(r)), outer));
        return binary(kind, p, l, r);
    }

    /// Gives r the schema target by computing each target column from r.
    Plan conform(Plan r, const AttrSet& target, const AttrSet& outer) {
        const std::vector<Attribute> scope = to_vector(set_union(schema_of(r), outer));
        for (const auto& a : target) r = plan::map(a, ctx_.operand(scope), r);
        return plan::project(target, r);
    }

    Ctx& ctx_;
    int djoins_left_ = 0;
    int extra_leaves_ = 0;
};

GeneratedPlan generate_in(Ctx& ctx) {
    ctx.min_rows = 1;
    PlanGen gen(ctx);
    for (int attempt = 0; attempt < 64; ++attempt) {
        ctx.cat.clear();
        ctx.tables = 0;
        Plan p = gen.generate();
        if (!find_dependent_joins(p).empty()) return {p, ctx.cat};
    }
    Plan l = gen.leaf({});
    Plan r = gen.correlate(gen.leaf({}), schema_of(l), schema_of(l));
    return {plan::dependent_join(expr::true_literal(), l, r), ctx.cat};
}

std::optional<TrialFailure> fuzz_trial(const GenSpec& spec, std::uint64_t seed, const UnnestConfig& cfg) {
    Ctx ctx(spec, seed);
    GeneratedPlan g = generate_in(ctx);
    TrialFailure f;
    f.seed = seed;
    f.suite = std::string("fuzz/") + to_string(cfg.perfect);
    f.max_rows = spec.max_rows;
    f.max_plan_depth = spec.max_plan_depth;
    f.left_plan = print_plan(g.plan);
    f.inputs = print_catalog(g.catalog);
    UnnestStats stats;
    Plan u;
    try {
        validate(g.plan);
        u = unnest(g.plan, cfg, &stats);
    } catch (const std::exception& e) {
        f.diff = std::string("unnest failed: ") + e.what();
        return f;
    }
    f.right_plan = print_plan(u);
    if (count_kind(u, PlanKind::DependentJoin) != 0) {
        f.diff = "dependent join left in the output";
        return f;
    }
    if (stats.max_visits() > 1) {
        f.diff = "push_down visited a node " + std::to_string(stats.max_visits()) + " times";
        return f;
    }
    if (auto d = check_equivalence(g.plan, u, g.catalog)) {
        f.diff = *d;
        return f;
    }
    try {
        if (!structurally_equal(unnest(u, cfg), u)) {
            f.diff = "unnest is not idempotent on this plan";
            return f;
        }
    } catch (const std::exception& e) {
        f.diff = std::string("second unnest failed: ") + e.what();
        return f;
    }
    return std::nullopt;
}

bool has_groupby(const Plan& p) { return count_kind(p, PlanKind::GroupBy) > 0; }

} // namespace

GeneratedPlan gen_correlated_plan(const GenSpec& spec, std::uint64_t seed) {
    Ctx ctx(spec, seed);
    return generate_in(ctx);
}

const std::vector<std::string>& suite_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& [name, b] : builders()) out.push_back(name);
        return out;
    }();
    return ids;
}

std::vector<std::string> core_suite_ids() {
    std::vector<std::string> out = suite_ids();
    std::erase(out, "T4.1+");
    return out;
}

EquivalenceReport run_lemma_suite(const std::string& id, std::size_t trials, const GenSpec& spec, Mutation mutation,
                                  int jobs) {
    const CaseBuilder& build = builder_for(id);
    auto results = run_trials(trials, jobs, [&](std::size_t i) -> std::optional<TrialFailure> {
        const std::uint64_t seed = mix_seed(spec.seed, i);
        auto f = suite_trial(id, build, spec, seed, mutation);
        if (!f) return f;
        return shrink(*f, spec, [&](const GenSpec& s) { return suite_trial(id, build, s, seed, mutation); });
    });
    std::string name = id;
    if (mutation != Mutation::None) name += std::string(" [") + to_string(mutation) + "]";
    return collect(std::move(name), trials, std::move(results));
}

EquivalenceReport run_fuzz(std::size_t trials, const GenSpec& spec, const UnnestConfig& cfg, int jobs) {
    auto results = run_trials(trials, jobs, [&](std::size_t i) -> std::optional<TrialFailure> {
        const std::uint64_t seed = mix_seed(spec.seed, i);
        auto f = fuzz_trial(spec, seed, cfg);
        if (!f) return f;
        return shrink(*f, spec, [&](const GenSpec& s) { return fuzz_trial(s, seed, cfg); });
    });
    return collect(std::string("fuzz/") + to_string(cfg.perfect), trials, std::move(results));
}

KindHistogram kind_histogram(const GenSpec& spec, std::size_t plans) {
    KindHistogram h;
    for (std::size_t i = 0; i < plans; ++i) {
        GeneratedPlan g = gen_correlated_plan(spec, mix_seed(spec.seed, i));
        ++h.plans;
        bool under = false;
        for_each_node(g.plan, [&](const Plan& n, const NodePath&) {
            ++h.nodes[static_cast<std::size_t>(n->kind)];
            if (n->kind == PlanKind::DependentJoin && has_groupby(n->right())) under = true;
        });
        if (under) ++h.groupby_under_djoin;
    }
    return h;
}

std::string report_text(const EquivalenceReport& r) {
    std::string out = r.suite + ": " + std::to_string(r.trials - r.failures.size()) + "/" +
                      std::to_string(r.trials) + " trials passed\n";
    for (const auto& f : r.failures) {
        out += "FAIL seed=" + std::to_string(f.seed) + " max_rows=" + std::to_string(f.max_rows) +
               " max_plan_depth=" + std::to_string(f.max_plan_depth) + "\n";
        out += "  " + f.diff + "\n";
        out += "left:\n" + f.left_plan + "\n";
        out += "right:\n" + f.right_plan + "\n";
        out += "inputs:\n" + f.inputs;
    }
    return out;
}

std::string report_json_lines(const EquivalenceReport& r) {
    std::string out = nlohmann::json{{"suite", r.suite},
                                     {"trials", r.trials},
                                     {"failures", r.failures.size()},
                                     {"passed", r.passed()}}
                          .dump() +
                      "\n";
    for (const auto& f : r.failures)
        out += nlohmann::json{{"suite", f.suite},
                              {"seed", f.seed},
                              {"max_rows", f.max_rows},
                              {"max_plan_depth", f.max_plan_depth},
                              {"left_plan", f.left_plan},
                              {"right_plan", f.right_plan},
                              {"inputs", f.inputs},
                              {"diff", f.diff}}
                   .dump() +
               "\n";
    return out;
}

} // namespace decorr
