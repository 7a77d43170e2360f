/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/expr.hpp"

#include "decorr/errors.hpp"

namespace decorr {

const char* kind_name(ExprKind kind) {
    switch (kind) {
        case ExprKind::Attr: return "attr";
        case ExprKind::Literal: return "literal";
        case ExprKind::Add: return "+";
        case ExprKind::Sub: return "-";
        case ExprKind::Mul: return "*";
        case ExprKind::Eq: return "=";
        case ExprKind::Ne: return "<>";
        case ExprKind::Lt: return "<";
        case ExprKind::Le: return "<=";
        case ExprKind::Gt: return ">";
        case ExprKind::Ge: return ">=";
        case ExprKind::NullSafeEq: return "<=>";
        case ExprKind::And: return "and";
        case ExprKind::Or: return "or";
        case ExprKind::Not: return "not";
        case ExprKind::IsNull: return "is-null";
    }
    return "?";
}

bool is_comparison(ExprKind kind) {
    switch (kind) {
        case ExprKind::Eq:
        case ExprKind::Ne:
        case ExprKind::Lt:
        case ExprKind::Le:
        case ExprKind::Gt:
        case ExprKind::Ge:
        case ExprKind::NullSafeEq: return true;
        default: return false;
    }
}

bool is_arithmetic(ExprKind kind) { return kind == ExprKind::Add || kind == ExprKind::Sub || kind == ExprKind::Mul; }

namespace expr {

ScalarExpr make(ExprKind kind, std::vector<ScalarExpr> args) {
    std::size_t n = args.size();
    bool ok = true;
    if (kind == ExprKind::Attr || kind == ExprKind::Literal)
        ok = false;
    else if (is_arithmetic(kind) || is_comparison(kind))
        ok = n == 2;
    else if (kind == ExprKind::Not || kind == ExprKind::IsNull)
        ok = n == 1;
    else
        ok = n >= 1;
    if (!ok) throw SchemaError(std::string("wrong operand count for '") + kind_name(kind) + "'");
    for (const auto& a : args)
        if (!a) throw SchemaError(std::string("null operand for '") + kind_name(kind) + "'");
    return std::make_shared<const ScalarNode>(ScalarNode{kind, {}, {}, std::move(args)});
}

ScalarExpr col(const Attribute& a) { return std::make_shared<const ScalarNode>(ScalarNode{ExprKind::Attr, a, {}, {}}); }
ScalarExpr lit(Value v) {
    return std::make_shared<const ScalarNode>(ScalarNode{ExprKind::Literal, {}, std::move(v), {}});
}
ScalarExpr true_literal() { return lit(Value(true)); }
ScalarExpr add(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Add, {std::move(l), std::move(r)}); }
ScalarExpr sub(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Sub, {std::move(l), std::move(r)}); }
ScalarExpr mul(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Mul, {std::move(l), std::move(r)}); }
ScalarExpr eq(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Eq, {std::move(l), std::move(r)}); }
ScalarExpr ne(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Ne, {std::move(l), std::move(r)}); }
ScalarExpr lt(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Lt, {std::move(l), std::move(r)}); }
ScalarExpr le(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Le, {std::move(l), std::move(r)}); }
ScalarExpr gt(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Gt, {std::move(l), std::move(r)}); }
ScalarExpr ge(ScalarExpr l, ScalarExpr r) { return make(ExprKind::Ge, {std::move(l), std::move(r)}); }
ScalarExpr null_safe_eq(ScalarExpr l, ScalarExpr r) {
    return make(ExprKind::NullSafeEq, {std::move(l), std::move(r)});
}
ScalarExpr and_(std::vector<ScalarExpr> args) { return make(ExprKind::And, std::move(args)); }
ScalarExpr or_(std::vector<ScalarExpr> args) { return make(ExprKind::Or, std::move(args)); }
ScalarExpr not_(ScalarExpr e) { return make(ExprKind::Not, {std::move(e)}); }
ScalarExpr is_null(ScalarExpr e) { return make(ExprKind::IsNull, {std::move(e)}); }

} // namespace expr

namespace {
void collect_refs(const ScalarExpr& e, AttrSet& out) {
    if (e->kind == ExprKind::Attr) {
        out.insert(e->attr);
        return;
    }
    for (const auto& a : e->args) collect_refs(a, out);
}

void collect_conjuncts(const ScalarExpr& e, std::vector<ScalarExpr>& out) {
    if (e->kind == ExprKind::And) {
        for (const auto& a : e->args) collect_conjuncts(a, out);
        return;
    }
    out.push_back(e);
}
} // namespace

AttrSet free_vars_expr(const ScalarExpr& e) {
    AttrSet out;
    collect_refs(e, out);
    return out;
}

bool is_true_literal(const ScalarExpr& e) {
    return e->kind == ExprKind::Literal && e->literal.is_bool() && e->literal.as_bool();
}

std::vector<ScalarExpr> conjuncts(const ScalarExpr& e) {
    std::vector<ScalarExpr> out;
    collect_conjuncts(e, out);
    return out;
}

ScalarExpr conjunction(const std::vector<ScalarExpr>& parts) {
    std::vector<ScalarExpr> kept;
    for (const auto& p : parts)
        if (!is_true_literal(p)) kept.push_back(p);
    if (kept.empty()) return expr::true_literal();
    if (kept.size() == 1) return kept.front();
    return expr::and_(std::move(kept));
}

ScalarExpr substitute(const ScalarExpr& e, const std::map<Attribute, Attribute>& mapping) {
    if (e->kind == ExprKind::Attr) {
        auto it = mapping.find(e->attr);
        return it == mapping.end() ? e : expr::col(it->second);
    }
    if (e->args.empty()) return e;
    std::vector<ScalarExpr> args;
    args.reserve(e->args.size());
    bool changed = false;
    for (const auto& a : e->args) {
        args.push_back(substitute(a, mapping));
        changed |= args.back() != a;
    }
    return changed ? expr::make(e->kind, std::move(args)) : e;
}

bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
    if (a->kind == ExprKind::Attr) return a->attr == b->attr;
    if (a->kind == ExprKind::Literal) return a->literal == b->literal;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!structurally_equal(a->args[i], b->args[i])) return false;
    return true;
}

} // namespace decorr
