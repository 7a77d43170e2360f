/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/errors.hpp"
#include "decorr/plan.hpp"

#include <gtest/gtest.h>

using namespace decorr;
using namespace decorr::expr;

namespace {

struct Tables {
    Attribute x = fresh_attribute("x");
    Attribute y = fresh_attribute("y");
    Attribute a = fresh_attribute("a");
    Attribute b = fresh_attribute("b");
    Plan r = plan::scan("R", {x});
    Plan s = plan::scan("S", {y});
    Plan t = plan::scan("T", {a, b});
};

} // namespace

TEST(Plan, ScanSchema) {
    Tables t;
    EXPECT_EQ(schema_of(t.t), (AttrSet{t.a, t.b}));
    EXPECT_TRUE(free_vars_plan(t.t).empty());
}

TEST(Plan, MapAddsItsAttribute) {
    Tables t;
    Attribute c = fresh_attribute("c");
    Plan m = plan::map(c, add(col(t.a), lit(1)), plan::scan("R", {t.a}));
    EXPECT_EQ(schema_of(m), (AttrSet{t.a, c}));
    EXPECT_THROW(plan::map(t.a, lit(1), plan::scan("R", {t.a})), SchemaError);
}

TEST(Plan, BinaryOperatorsNeedDisjointInputs) {
    Tables t;
    EXPECT_THROW(plan::cross(t.r, plan::scan("R2", {t.x})), SchemaError);
    EXPECT_THROW(plan::join(true_literal(), t.r, t.r), SchemaError);
}

TEST(Plan, SetOperationsNeedEqualSchemas) {
    Tables t;
    EXPECT_THROW(plan::set_union(t.r, t.s), SchemaError);
    EXPECT_NO_THROW(plan::set_union(t.r, plan::scan("R2", {t.x})));
}

TEST(Plan, FreeVariablesOfCorrelatedSelection) {
    Tables t;
    Plan sel = plan::select(eq(col(t.x), col(t.y)), t.s);
    EXPECT_EQ(free_vars_plan(sel), (AttrSet{t.x}));
    EXPECT_EQ(schema_of(sel), (AttrSet{t.y}));
}

TEST(Plan, DependentJoinBindsTheRightInput) {
    Tables t;
    Plan sel = plan::select(eq(col(t.x), col(t.y)), t.s);
    Plan dj = plan::dependent_join(true_literal(), t.r, sel);
    EXPECT_TRUE(free_vars_plan(dj).empty());
    EXPECT_EQ(schema_of(dj), (AttrSet{t.x, t.y}));
    // A regular join cannot bind the reference.
    EXPECT_THROW(plan::join(true_literal(), t.r, sel), SchemaError);
    EXPECT_THROW(plan::cross(t.r, sel), SchemaError);
}

TEST(Plan, CrossOfIndependentScansIsClosed) {
    Tables t;
    EXPECT_TRUE(free_vars_plan(plan::cross(t.r, t.s)).empty());
}

TEST(Plan, RenameAndProjectPreconditions) {
    Tables t;
    Attribute n = fresh_attribute("n");
    Plan rn = plan::rename(n, t.a, t.t);
    EXPECT_EQ(schema_of(rn), (AttrSet{n, t.b}));
    EXPECT_THROW(plan::rename(t.b, t.a, t.t), SchemaError);
    EXPECT_THROW(plan::rename(n, t.x, t.t), SchemaError);
    EXPECT_THROW(plan::project({t.x}, t.t), SchemaError);
    EXPECT_EQ(schema_of(plan::project_distinct({t.a}, t.t)), (AttrSet{t.a}));
}

TEST(Plan, GroupByPreconditions) {
    Tables t;
    Attribute c = fresh_attribute("c");
    Plan g = plan::group_by({t.a}, {{c, {AggKind::Sum, t.b}}}, t.t);
    EXPECT_EQ(schema_of(g), (AttrSet{t.a, c}));
    EXPECT_THROW(plan::group_by({t.x}, {{c, {AggKind::CountStar, {}}}}, t.t), SchemaError);
    EXPECT_THROW(plan::group_by({t.a}, {{t.b, {AggKind::CountStar, {}}}}, t.t), SchemaError);
    EXPECT_THROW(plan::group_by({}, {{c, {AggKind::Sum, t.x}}}, t.t), SchemaError);
}

TEST(Plan, NullPadAddsNewAttributes) {
    Tables t;
    Attribute n = fresh_attribute("n");
    EXPECT_EQ(schema_of(plan::null_pad({n}, t.r)), (AttrSet{t.x, n}));
}

TEST(Plan, FreeVariablesNeverOverlapTheSchema) {
    Tables t;
    Plan sel = plan::select(eq(col(t.x), col(t.y)), t.s);
    for (const Plan& p : {sel, plan::map(fresh_attribute("m"), col(t.x), sel),
                          plan::dependent_join(lt(col(t.x), col(t.y)), t.r, sel)})
        EXPECT_FALSE(intersects(free_vars_plan(p), schema_of(p)));
}

TEST(Plan, ValidateChecksOuterBindings) {
    Tables t;
    Plan sel = plan::select(eq(col(t.x), col(t.y)), t.s);
    EXPECT_THROW(validate(sel), SchemaError);
    EXPECT_NO_THROW(validate(sel, {t.x}));
}

TEST(Plan, TraversalAndCounting) {
    Tables t;
    Plan sel = plan::select(eq(col(t.x), col(t.y)), t.s);
    Plan dj = plan::dependent_join(true_literal(), t.r, sel);
    EXPECT_EQ(count_nodes(dj), 4u);
    EXPECT_EQ(count_kind(dj, PlanKind::Scan), 2u);
    std::vector<NodePath> paths;
    for_each_node(dj, [&](const Plan&, const NodePath& p) { paths.push_back(p); });
    ASSERT_EQ(paths.size(), 4u);
    EXPECT_EQ(paths[0], NodePath{});
    EXPECT_EQ(paths[2], (NodePath{1}));
    EXPECT_EQ(node_at(dj, {1, 0}), t.s);
}

TEST(Plan, AlphaEquivalenceIgnoresIdsButNotStructure) {
    auto build = [](const char* name) {
        Attribute x = fresh_attribute("x"), m = fresh_attribute("m");
        return plan::map(m, add(col(x), lit(1)), plan::scan(name, {x}));
    };
    Plan p1 = build("R"), p2 = build("R");
    EXPECT_FALSE(structurally_equal(p1, p2));
    EXPECT_TRUE(alpha_equivalent(p1, p2));
    EXPECT_FALSE(alpha_equivalent(p1, build("S")));
    EXPECT_TRUE(structurally_equal(p1, p1));
}
