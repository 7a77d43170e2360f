/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/attribute.hpp"
#include "decorr/errors.hpp"
#include "decorr/expr.hpp"
#include "decorr/relation.hpp"
#include "decorr/tuple.hpp"
#include "decorr/value.hpp"

#include <gtest/gtest.h>

using namespace decorr;

TEST(Value, NullIsAnOrdinaryElementUnderIdentity) {
    EXPECT_EQ(Value::null(), Value::null());
    EXPECT_NE(Value::null(), Value(0));
    EXPECT_LT(Value::null(), Value(false));
    EXPECT_LT(Value(1), Value(2));
    EXPECT_NE(Value(1), Value("1"));
}

TEST(Value, LiteralSpelling) {
    EXPECT_EQ(Value::null().to_string(), "NULL");
    EXPECT_EQ(Value(true).to_string(), "true");
    EXPECT_EQ(Value(-42).to_string(), "-42");
    EXPECT_EQ(Value("a\"b\\c").to_string(), "\"a\\\"b\\\\c\"");
}

TEST(Attribute, FreshIdsAreUniqueAndIncreasing) {
    Attribute a = fresh_attribute("d");
    Attribute b = fresh_attribute("d");
    EXPECT_NE(a, b);
    EXPECT_LT(a.id(), b.id());
    EXPECT_EQ(a.base(), "d");
    EXPECT_EQ(a.str(), "d#" + std::to_string(a.id()));
}

TEST(Attribute, SetHelpers) {
    Attribute a = fresh_attribute("a"), b = fresh_attribute("b"), c = fresh_attribute("c");
    AttrSet ab{a, b}, bc{b, c};
    EXPECT_EQ(set_union(ab, bc), (AttrSet{a, b, c}));
    EXPECT_EQ(set_intersection(ab, bc), (AttrSet{b}));
    EXPECT_EQ(set_difference(ab, bc), (AttrSet{a}));
    EXPECT_TRUE(intersects(ab, bc));
    EXPECT_FALSE(intersects(AttrSet{a}, AttrSet{c}));
    EXPECT_TRUE(is_subset(AttrSet{}, ab));
    EXPECT_FALSE(is_subset(bc, ab));
}

class TupleTest : public ::testing::Test {
protected:
    Attribute a = fresh_attribute("a");
    Attribute b = fresh_attribute("b");
};

TEST_F(TupleTest, Restrict) {
    Tuple t = tuple_concat(Tuple::single(a, 1), Tuple::single(b, 2));
    EXPECT_EQ(tuple_restrict(t, {a}), Tuple::single(a, 1));
    EXPECT_TRUE(tuple_restrict(Tuple::single(a, 1), {}).empty());
    EXPECT_THROW(tuple_restrict(Tuple::single(a, 1), {b}), SchemaError);
    EXPECT_EQ(tuple_restrict(t, t.attributes()), t);
}

TEST_F(TupleTest, Concat) {
    Tuple t = tuple_concat(Tuple::single(a, 1), Tuple::single(b, 2));
    EXPECT_EQ(t.attributes(), (AttrSet{a, b}));
    EXPECT_EQ(t.at(b), Value(2));
    EXPECT_EQ(tuple_concat(Tuple::single(a, 1), Tuple{}), Tuple::single(a, 1));
    EXPECT_THROW(tuple_concat(Tuple::single(a, 1), Tuple::single(a, 2)), SchemaError);
    // Order of concatenation does not matter.
    EXPECT_EQ(tuple_concat(Tuple::single(b, 2), Tuple::single(a, 1)), t);
}

TEST_F(TupleTest, FromRejectsDuplicates) {
    std::vector<Attribute> attrs{a, a};
    std::vector<Value> values{1, 2};
    EXPECT_THROW(Tuple::from(attrs, values), SchemaError);
}

TEST(Relation, CharacteristicFunction) {
    Attribute a = fresh_attribute("a");
    Relation r({a});
    r.add(Tuple::single(a, 1), 2);
    r.add(Tuple::single(a, 1));
    r.add(Tuple::single(a, Value::null()));
    r.add(Tuple::single(a, 5), 0);
    EXPECT_EQ(r.count(Tuple::single(a, 1)), 3u);
    EXPECT_EQ(r.count(Tuple::single(a, 5)), 0u);
    EXPECT_EQ(r.count(Tuple::single(fresh_attribute("a"), 1)), 0u);
    EXPECT_EQ(r.distinct_size(), 2u);
    EXPECT_EQ(r.total(), 4u);
    EXPECT_FALSE(r.is_duplicate_free());
}

TEST(Relation, AddChecksSchema) {
    Attribute a = fresh_attribute("a"), b = fresh_attribute("b");
    Relation r({a});
    EXPECT_THROW(r.add(Tuple::single(b, 1)), SchemaError);
    EXPECT_THROW(r.add_row({1, 2}), SchemaError);
}

TEST(Relation, FirstDifferenceReportsBothCounts) {
    Attribute a = fresh_attribute("a");
    Relation r1({a}), r2({a});
    r1.add(Tuple::single(a, 1), 2);
    r2.add(Tuple::single(a, 1), 1);
    r2.add(Tuple::single(a, 0), 1);
    auto d = first_difference(r1, r2);
    ASSERT_TRUE(d);
    EXPECT_EQ(d->tuple, Tuple::single(a, 0));
    EXPECT_EQ(d->left_count, 0u);
    EXPECT_EQ(d->right_count, 1u);
    EXPECT_FALSE(first_difference(r1, r1));
}

TEST(Relation, EqualUpToRenamingMatchesColumnsByPosition) {
    Attribute a1 = fresh_attribute("a"), a2 = fresh_attribute("a"), b = fresh_attribute("b");
    Relation r1({a1}), r2({a2}), r3({b});
    r1.add_row({7});
    r2.add_row({7});
    r3.add_row({7});
    EXPECT_TRUE(equal_up_to_renaming(r1, r2));
    EXPECT_FALSE(equal_up_to_renaming(r1, r3));
    EXPECT_FALSE(r1 == r2);
}

TEST(Expr, FreeVariables) {
    Attribute x = fresh_attribute("x"), y = fresh_attribute("y");
    EXPECT_TRUE(free_vars_expr(expr::lit(5)).empty());
    EXPECT_EQ(free_vars_expr(expr::eq(expr::col(x), expr::col(y))), (AttrSet{x, y}));
    auto e = expr::and_({expr::eq(expr::col(x), expr::col(y)), expr::lt(expr::col(x), expr::lit(3))});
    EXPECT_EQ(free_vars_expr(e), (AttrSet{x, y}));
}

TEST(Expr, ConjunctsAndConjunction) {
    Attribute x = fresh_attribute("x");
    auto p = expr::eq(expr::col(x), expr::lit(1));
    auto q = expr::gt(expr::col(x), expr::lit(0));
    auto nested = expr::and_({p, expr::and_({q, expr::true_literal()})});
    EXPECT_EQ(conjuncts(nested).size(), 3u);
    EXPECT_TRUE(is_true_literal(conjunction({})));
    EXPECT_TRUE(structurally_equal(conjunction({expr::true_literal(), p}), p));
}

TEST(Expr, SubstituteReplacesEveryOccurrence) {
    Attribute d = fresh_attribute("d"), d2 = fresh_attribute("d"), a = fresh_attribute("a");
    auto e = expr::add(expr::col(d), expr::col(d));
    auto s = substitute(e, {{d, d2}});
    EXPECT_EQ(free_vars_expr(s), (AttrSet{d2}));
    auto untouched = expr::eq(expr::col(a), expr::lit(1));
    EXPECT_EQ(substitute(untouched, {{d, d2}}), untouched);
}

TEST(Expr, MakeChecksArity) {
    EXPECT_THROW(expr::make(ExprKind::Not, {}), SchemaError);
    EXPECT_THROW(expr::make(ExprKind::Eq, {expr::lit(1)}), SchemaError);
}
