/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/evaluator.hpp"

#include "decorr/errors.hpp"

#include <algorithm>

namespace decorr {

const char* to_string(Truth t) {
    switch (t) {
        case Truth::True: return "TRUE";
        case Truth::False: return "FALSE";
        case Truth::Unknown: return "UNKNOWN";
    }
    return "?";
}

namespace {

using Row = Relation::Row;

/// Attribute lookup for one row: the row's own columns shadow the outer bindings.
struct RowScope {
    const std::vector<Attribute>& columns;
    const Row& row;
    const BindEnv& env;

    const Value* find(const Attribute& a) const {
        auto it = std::lower_bound(columns.begin(), columns.end(), a);
        if (it != columns.end() && *it == a) return &row[static_cast<std::size_t>(it - columns.begin())];
        return env.find(a);
    }
};

struct TupleScope {
    const Tuple& tuple;
    const BindEnv& env;

    const Value* find(const Attribute& a) const {
        if (const Value* v = tuple.find(a)) return v;
        return env.find(a);
    }
};

[[noreturn]] void type_error(const char* op, const Value& a, const Value& b) {
    throw EvalError(std::string("type mismatch in '") + op + "': " + a.kind_name() + " vs " + b.kind_name());
}

/// Truth of a boolean-or-NULL value; anything else is a type error.
Truth truth_of(const Value& v, const char* context) {
    if (v.is_null()) return Truth::Unknown;
    if (!v.is_bool()) throw EvalError(std::string("non-boolean operand ") + v.to_string() + " in " + context);
    return v.as_bool() ? Truth::True : Truth::False;
}

template <class Scope>
Value eval(const ScalarExpr& e, const Scope& scope) {
    switch (e->kind) {
        case ExprKind::Attr: {
            if (const Value* v = scope.find(e->attr)) return *v;
            throw EvalError("unbound attribute " + e->attr.str());
        }
        case ExprKind::Literal: return e->literal;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul: {
            Value a = eval(e->args[0], scope);
            Value b = eval(e->args[1], scope);
            if (a.is_null() || b.is_null()) return Value::null();
            if (!a.is_int() || !b.is_int()) type_error(kind_name(e->kind), a, b);
            if (e->kind == ExprKind::Add) return Value(a.as_int() + b.as_int());
            if (e->kind == ExprKind::Sub) return Value(a.as_int() - b.as_int());
            return Value(a.as_int() * b.as_int());
        }
        case ExprKind::NullSafeEq: {
            Value a = eval(e->args[0], scope);
            Value b = eval(e->args[1], scope);
            if (!a.is_null() && !b.is_null() && a.repr().index() != b.repr().index()) type_error("<=>", a, b);
            return Value(a == b);
        }
        case ExprKind::Eq:
        case ExprKind::Ne:
        case ExprKind::Lt:
        case ExprKind::Le:
        case ExprKind::Gt:
        case ExprKind::Ge: {
            Value a = eval(e->args[0], scope);
            Value b = eval(e->args[1], scope);
            if (a.is_null() || b.is_null()) return Value::null();
            if (a.repr().index() != b.repr().index()) type_error(kind_name(e->kind), a, b);
            auto c = a <=> b;
            switch (e->kind) {
                case ExprKind::Eq: return Value(c == 0);
                case ExprKind::Ne: return Value(c != 0);
                case ExprKind::Lt: return Value(c < 0);
                case ExprKind::Le: return Value(c <= 0);
                case ExprKind::Gt: return Value(c > 0);
                default: return Value(c >= 0);
            }
        }
        case ExprKind::And:
        case ExprKind::Or: {
            // Kleene logic; all operands are evaluated so type errors are never masked.
            const bool is_and = e->kind == ExprKind::And;
            const Truth dominant = is_and ? Truth::False : Truth::True;
            bool unknown = false;
            bool decided = false;
            for (const auto& arg : e->args) {
                Truth t = truth_of(eval(arg, scope), kind_name(e->kind));
                if (t == dominant) decided = true;
                if (t == Truth::Unknown) unknown = true;
            }
            if (decided) return Value(!is_and);
            if (unknown) return Value::null();
            return Value(is_and);
        }
        case ExprKind::Not: {
            Truth t = truth_of(eval(e->args[0], scope), "not");
            if (t == Truth::Unknown) return Value::null();
            return Value(t == Truth::False);
        }
        case ExprKind::IsNull: return Value(eval(e->args[0], scope).is_null());
    }
    throw EvalError("unknown expression kind");
}

template <class Scope>
Truth predicate(const ScalarExpr& e, const Scope& scope) {
    return truth_of(eval(e, scope), "predicate");
}

/// Positions of attrs (a subset of columns) within columns.
std::vector<std::size_t> positions(const std::vector<Attribute>& columns, const AttrSet& attrs) {
    std::vector<std::size_t> out;
    for (const auto& a : attrs) {
        auto it = std::lower_bound(columns.begin(), columns.end(), a);
        if (it == columns.end() || !(*it == a)) throw SchemaError("attribute " + a.str() + " not in relation");
        out.push_back(static_cast<std::size_t>(it - columns.begin()));
    }
    return out;
}

Row pick(const Row& row, const std::vector<std::size_t>& pos) {
    Row out;
    out.reserve(pos.size());
    for (std::size_t p : pos) out.push_back(row[p]);
    return out;
}

// Each helper below transcribes one characteristic-function definition.

Relation set_union(const Relation& a, const Relation& b) {
    Relation out(a.schema());
    for (const auto& [row, n] : a.rows()) out.add_row(row, n);
    for (const auto& [row, n] : b.rows()) out.add_row(row, n);
    return out;
}

Relation set_intersect(const Relation& a, const Relation& b) {
    Relation out(a.schema());
    for (const auto& [row, n] : a.rows()) out.add_row(row, std::min(n, b.count_row(row)));
    return out;
}

Relation set_except(const Relation& a, const Relation& b) {
    Relation out(a.schema());
    for (const auto& [row, n] : a.rows()) {
        std::uint64_t m = b.count_row(row);
        if (n > m) out.add_row(row, n - m);
    }
    return out;
}

void require_same_schema(const Relation& a, const Relation& b, PlanKind kind) {
    if (a.columns() != b.columns())
        throw SchemaError(std::string(kind_name(kind)) + ": input schemas differ at evaluation");
}

Relation project_distinct(const Relation& r, const AttrSet& attrs) {
    auto pos = positions(r.columns(), attrs);
    Relation out(attrs);
    for (const auto& [row, n] : r.rows()) {
        Row x = pick(row, pos);
        if (out.count_row(x) == 0) out.add_row(std::move(x), 1);
    }
    return out;
}

Relation project(const Relation& r, const AttrSet& attrs) {
    auto pos = positions(r.columns(), attrs);
    Relation out(attrs);
    for (const auto& [row, n] : r.rows()) out.add_row(pick(row, pos), n);
    return out;
}

Relation select(const Relation& r, const ScalarExpr& pred, const BindEnv& env) {
    Relation out(r.schema());
    for (const auto& [row, n] : r.rows())
        if (predicate(pred, RowScope{r.columns(), row, env}) == Truth::True) out.add_row(row, n);
    return out;
}

Relation map(const Relation& r, const Attribute& a, const ScalarExpr& f, const BindEnv& env) {
    AttrSet schema = r.schema();
    schema.insert(a);
    Relation out(schema);
    std::size_t at = *out.index_of(a);
    for (const auto& [row, n] : r.rows()) {
        Row x = row;
        x.insert(x.begin() + static_cast<std::ptrdiff_t>(at), eval(f, RowScope{r.columns(), row, env}));
        out.add_row(std::move(x), n);
    }
    return out;
}

Relation rename(const Relation& r, const Attribute& to, const Attribute& from, const BindEnv& env) {
    AttrSet keep = r.schema();
    keep.erase(from);
    keep.insert(to);
    return project(map(r, to, expr::col(from), env), keep);
}

Relation cross(const Relation& a, const Relation& b) {
    Relation out(set_union(a.schema(), b.schema()));
    // For each output column: (from left?, position).
    std::vector<std::pair<bool, std::size_t>> source;
    for (const auto& c : out.columns()) {
        if (auto i = a.index_of(c))
            source.emplace_back(true, *i);
        else
            source.emplace_back(false, *b.index_of(c));
    }
    for (const auto& [x, n] : a.rows())
        for (const auto& [y, m] : b.rows()) {
            Row row;
            row.reserve(source.size());
            for (auto [left, i] : source) row.push_back(left ? x[i] : y[i]);
            out.add_row(std::move(row), n * m);
        }
    return out;
}

Relation join(const Relation& a, const Relation& b, const ScalarExpr& pred, const BindEnv& env) {
    return select(cross(a, b), pred, env);
}

Relation semi_join(const Relation& a, const Relation& b, const ScalarExpr& pred, const BindEnv& env) {
    return set_intersect(a, project(join(a, b, pred, env), a.schema()));
}

Relation anti_join(const Relation& a, const Relation& b, const ScalarExpr& pred, const BindEnv& env) {
    return set_except(a, semi_join(a, b, pred, env));
}

Relation null_pad(Relation r, const AttrSet& attrs) {
    // One map per missing attribute, smallest id first.
    for (;;) {
        AttrSet missing = decorr::set_difference(attrs, r.schema());
        if (missing.empty()) return r;
        r = map(r, *missing.begin(), expr::lit(Value::null()), {});
    }
}

Relation group_by(const Relation& r, const AttrSet& keys, const std::vector<Aggregate>& aggs) {
    AttrSet schema = keys;
    for (const auto& agg : aggs) schema.insert(agg.output);
    Relation out(schema);
    auto key_pos = positions(r.columns(), keys);
    Relation groups = project_distinct(r, keys);
    for (const auto& [x, ignored] : groups.rows()) {
        // R' = rows agreeing with x on every key; NULL groups with NULL.
        Relation members(r.schema());
        for (const auto& [row, n] : r.rows())
            if (pick(row, key_pos) == x) members.add_row(row, n);
        Tuple t = groups.tuple(x);
        for (const auto& agg : aggs) t.set(agg.output, aggregate(agg.fn, members));
        out.add(t, 1);
    }
    return out;
}

Relation evaluate_node(const PlanNode& p, const Catalog& cat, const BindEnv& env);

Relation evaluate_child(const Plan& p, const Catalog& cat, const BindEnv& env) { return evaluate_node(*p, cat, env); }

Relation dependent_join(const PlanNode& p, const Catalog& cat, const BindEnv& env) {
    Relation left = evaluate_child(p.left(), cat, env);
    const AttrSet bound = set_intersection(p.right()->free_vars, left.schema());
    auto bound_pos = positions(left.columns(), bound);
    Relation out(p.schema);
    for (const auto& [l, n] : left.rows()) {
        // bind(R2, l|F(R2)): the left tuple's attributes shadow outer bindings.
        BindEnv inner = env;
        std::size_t k = 0;
        for (const auto& a : bound) inner.set(a, l[bound_pos[k++]]);
        Relation right = evaluate_child(p.right(), cat, inner);
        Relation single(left.schema());
        single.add_row(l, n);
        Relation product = cross(single, right);
        for (const auto& [row, m] : product.rows())
            if (predicate(p.expr, RowScope{product.columns(), row, env}) == Truth::True) out.add_row(row, m);
    }
    return out;
}

Relation evaluate_node(const PlanNode& p, const Catalog& cat, const BindEnv& env) {
    switch (p.kind) {
        case PlanKind::Scan: {
            auto it = cat.find(p.table);
            if (it == cat.end()) throw EvalError("unknown table '" + p.table + "'");
            if (it->second.schema() != p.attrs)
                throw SchemaError("scan " + p.table + ": catalog schema " + format_attrs(it->second.schema()) +
                                  " differs from plan " + format_attrs(p.attrs));
            return it->second;
        }
        case PlanKind::Select: return select(evaluate_child(p.child(), cat, env), p.expr, env);
        case PlanKind::Map: return map(evaluate_child(p.child(), cat, env), p.target, p.expr, env);
        case PlanKind::ProjectDistinct: return project_distinct(evaluate_child(p.child(), cat, env), p.attrs);
        case PlanKind::Project: return project(evaluate_child(p.child(), cat, env), p.attrs);
        case PlanKind::Rename: return rename(evaluate_child(p.child(), cat, env), p.target, p.source, env);
        case PlanKind::Union:
        case PlanKind::Intersect:
        case PlanKind::Except: {
            Relation a = evaluate_child(p.left(), cat, env);
            Relation b = evaluate_child(p.right(), cat, env);
            require_same_schema(a, b, p.kind);
            if (p.kind == PlanKind::Union) return set_union(a, b);
            if (p.kind == PlanKind::Intersect) return set_intersect(a, b);
            return set_except(a, b);
        }
        case PlanKind::Cross: return cross(evaluate_child(p.left(), cat, env), evaluate_child(p.right(), cat, env));
        case PlanKind::Join:
            return join(evaluate_child(p.left(), cat, env), evaluate_child(p.right(), cat, env), p.expr, env);
        case PlanKind::DependentJoin: return dependent_join(p, cat, env);
        case PlanKind::SemiJoin:
            return semi_join(evaluate_child(p.left(), cat, env), evaluate_child(p.right(), cat, env), p.expr, env);
        case PlanKind::AntiJoin:
            return anti_join(evaluate_child(p.left(), cat, env), evaluate_child(p.right(), cat, env), p.expr, env);
        case PlanKind::OuterJoin: {
            Relation a = evaluate_child(p.left(), cat, env);
            Relation b = evaluate_child(p.right(), cat, env);
            return set_union(join(a, b, p.expr, env), null_pad(anti_join(a, b, p.expr, env), b.schema()));
        }
        case PlanKind::NullPad: return null_pad(evaluate_child(p.child(), cat, env), p.attrs);
        case PlanKind::GroupBy: return group_by(evaluate_child(p.child(), cat, env), p.attrs, p.aggs);
    }
    throw EvalError("unknown plan node");
}

} // namespace

Relation evaluate(const Plan& p, const Catalog& cat, const BindEnv& env) {
    for (const auto& a : p->free_vars)
        if (!env.contains(a)) throw EvalError("unbound free variable " + a.str());
    return evaluate_node(*p, cat, env);
}

Value eval_scalar(const ScalarExpr& e, const Tuple& t, const BindEnv& env) { return eval(e, TupleScope{t, env}); }

Truth eval_predicate(const ScalarExpr& e, const Tuple& t, const BindEnv& env) {
    return predicate(e, TupleScope{t, env});
}

Value aggregate(const AggFn& f, const Relation& r) {
    if (f.kind == AggKind::CountStar) return Value(static_cast<std::int64_t>(r.total()));
    if (!f.input) throw EvalError(std::string(kind_name(f.kind)) + " needs an input attribute");
    auto idx = r.index_of(*f.input);
    if (!idx) throw SchemaError("aggregate input " + f.input->str() + " not in relation");

    std::int64_t count = 0;
    std::int64_t sum = 0;
    Value best;  // NULL until the first non-NULL input
    for (const auto& [row, n] : r.rows()) {
        const Value& v = row[*idx];
        if (v.is_null()) continue;
        const auto times = static_cast<std::int64_t>(n);
        count += times;
        switch (f.kind) {
            case AggKind::Sum:
                if (!v.is_int()) throw EvalError(std::string("sum over ") + v.kind_name() + " values");
                sum += v.as_int() * times;
                break;
            case AggKind::Min:
            case AggKind::Max:
                if (!best.is_null() && best.repr().index() != v.repr().index())
                    type_error(kind_name(f.kind), best, v);
                if (best.is_null() || (f.kind == AggKind::Min ? v < best : best < v)) best = v;
                break;
            default: break;
        }
    }
    switch (f.kind) {
        case AggKind::Count: return Value(count);
        case AggKind::Sum: return count == 0 ? Value::null() : Value(sum);
        default: return best;
    }
}

} // namespace decorr
