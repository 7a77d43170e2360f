/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/evaluator.hpp"
#include "decorr/expr.hpp"
#include "decorr/plan.hpp"
#include "decorr/relation.hpp"

#include <string>
#include <string_view>

namespace decorr {

/// Contents of a `.plan` file: table definitions followed by one plan.
///
///     ; comment
///     table R rel (x) { (1) (2) x3 }
///     table S rel (y) { (1) }
///     plan
///     (djoin true
///       (scan R)
///       (select (= y x)
///         (scan S)))
struct PlanScript {
    Catalog catalog;
    Plan plan;
};

/// Prefix rendering of a scalar expression, e.g. `(and (= d#3 a#1) (< a#1 3))`.
std::string print_expr(const ScalarExpr& e);

/// One node per line, two-space indentation, attributes as `base#id`.
std::string print_plan(const Plan& p);

/// `rel (a#1 b#2) { (1 NULL) x2 ... }`, rows in canonical order, multiplicity
/// suffix only when greater than one.
std::string print_relation(const Relation& r);

std::string print_script(const PlanScript& script);

/// Parses a plan against cat. Attribute tokens resolve to catalog columns by
/// printed form (`x#4`) or, when unambiguous, by base name. Attributes
/// introduced by map, rename, nullpad and groupby get fresh ids; within one
/// text a token always denotes the same attribute. Throws ParseError, or
/// SchemaError for an ill-formed plan.
Plan parse_plan(std::string_view text, const Catalog& cat);

/// Parses a single `rel (...) { ... }`; every column gets a fresh attribute.
Relation parse_relation(std::string_view text);

PlanScript parse_script(std::string_view text);

} // namespace decorr
