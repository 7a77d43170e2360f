/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/expr.hpp"
#include "decorr/plan.hpp"
#include "decorr/relation.hpp"
#include "decorr/tuple.hpp"
#include "decorr/value.hpp"

#include <map>
#include <string>

namespace decorr {

/// Base tables by name.
using Catalog = std::map<std::string, Relation>;

/// Outer bindings made globally available by `bind` while evaluating the
/// right input of a dependent join.
using BindEnv = Tuple;

enum class Truth { True, False, Unknown };

const char* to_string(Truth t);

/// Evaluates p under env. The evaluator is a direct transcription of the
/// operators' characteristic-function definitions and serves as the
/// correctness oracle; dependent joins re-evaluate their right input for
/// every left tuple.
///
/// Throws EvalError for unknown tables, unbound attributes and type errors,
/// and SchemaError when a scanned table does not match the plan.
Relation evaluate(const Plan& p, const Catalog& cat, const BindEnv& env = {});

/// Value of e under t (then env). Arithmetic with a NULL operand yields NULL;
/// comparisons and connectives yield a boolean or NULL (unknown).
Value eval_scalar(const ScalarExpr& e, const Tuple& t, const BindEnv& env = {});

/// Three-valued truth of a boolean expression. `=` with a NULL operand is
/// unknown; null-safe equality treats NULL as an ordinary value.
Truth eval_predicate(const ScalarExpr& e, const Tuple& t, const BindEnv& env = {});

/// f(R). COUNT(*) counts all tuples with multiplicity; the other functions
/// skip NULL inputs. SUM/MIN/MAX over no non-NULL input are NULL.
Value aggregate(const AggFn& f, const Relation& r);

} // namespace decorr
