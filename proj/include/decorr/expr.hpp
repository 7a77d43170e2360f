/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/attribute.hpp"
#include "decorr/value.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace decorr {

enum class ExprKind {
    Attr,
    Literal,
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    NullSafeEq,
    And,
    Or,
    Not,
    IsNull,
};

struct ScalarNode;
/// Immutable scalar expression tree; shared freely between plans.
using ScalarExpr = std::shared_ptr<const ScalarNode>;

struct ScalarNode {
    ExprKind kind;
    Attribute attr;                // Attr
    Value literal;                 // Literal
    std::vector<ScalarExpr> args;  // operands; And/Or are n-ary
};

const char* kind_name(ExprKind kind);
bool is_comparison(ExprKind kind);
bool is_arithmetic(ExprKind kind);

namespace expr {
ScalarExpr col(const Attribute& a);
ScalarExpr lit(Value v);
ScalarExpr true_literal();
ScalarExpr add(ScalarExpr l, ScalarExpr r);
ScalarExpr sub(ScalarExpr l, ScalarExpr r);
ScalarExpr mul(ScalarExpr l, ScalarExpr r);
ScalarExpr eq(ScalarExpr l, ScalarExpr r);
ScalarExpr ne(ScalarExpr l, ScalarExpr r);
ScalarExpr lt(ScalarExpr l, ScalarExpr r);
ScalarExpr le(ScalarExpr l, ScalarExpr r);
ScalarExpr gt(ScalarExpr l, ScalarExpr r);
ScalarExpr ge(ScalarExpr l, ScalarExpr r);
/// Equality under which NULL equals NULL; used for natural and domain joins.
ScalarExpr null_safe_eq(ScalarExpr l, ScalarExpr r);
ScalarExpr and_(std::vector<ScalarExpr> args);
ScalarExpr or_(std::vector<ScalarExpr> args);
ScalarExpr not_(ScalarExpr e);
ScalarExpr is_null(ScalarExpr e);
/// Builds a node of any kind from operands (used by the parser and rewriters).
ScalarExpr make(ExprKind kind, std::vector<ScalarExpr> args);
} // namespace expr

/// F(e): every attribute referenced in e.
AttrSet free_vars_expr(const ScalarExpr& e);

bool is_true_literal(const ScalarExpr& e);

/// Top-level conjuncts (And nodes flattened recursively).
std::vector<ScalarExpr> conjuncts(const ScalarExpr& e);

/// Conjunction of the arguments, dropping literal `true`; empty yields `true`.
ScalarExpr conjunction(const std::vector<ScalarExpr>& parts);

/// Replaces attribute references according to mapping; shares unchanged subtrees.
ScalarExpr substitute(const ScalarExpr& e, const std::map<Attribute, Attribute>& mapping);

bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b);

} // namespace decorr
