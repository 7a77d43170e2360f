/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/errors.hpp"
#include "decorr/harness.hpp"
#include "decorr/plan_text.hpp"
#include "decorr/unnester.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace decorr;
using namespace decorr::expr;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

/// R{x} and S{y} filled with random data for each seed.
struct TwoTables {
    Attribute x = fresh_attribute("x");
    Attribute y = fresh_attribute("y");
    Plan r = plan::scan("R", {x});
    Plan s = plan::scan("S", {y});

    Catalog catalog(std::uint64_t seed) const {
        GenSpec spec;
        return {{"R", gen_relation(spec, {x}, seed)}, {"S", gen_relation(spec, {y}, seed + 1000)}};
    }
};

void expect_equivalent_on_random_data(const Plan& p, const Plan& q, const TwoTables& t) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto diff = check_equivalence(p, q, t.catalog(seed));
        ASSERT_FALSE(diff) << "seed " << seed << ": " << *diff;
    }
}

} // namespace

TEST(FindDependentJoins, OnlyCorrelatedOnes) {
    TwoTables t;
    EXPECT_TRUE(find_dependent_joins(plan::cross(t.r, t.s)).empty());
    Plan corr = plan::dependent_join(true_literal(), t.r, plan::select(eq(col(t.x), col(t.y)), t.s));
    EXPECT_EQ(find_dependent_joins(corr), std::vector<NodePath>{NodePath{}});
    EXPECT_TRUE(find_dependent_joins(plan::dependent_join(true_literal(), t.r, t.s)).empty());
}

TEST(SimpleElimination, HoistsASelectionAndTurnsTheNodeIntoAJoin) {
    TwoTables t;
    ScalarExpr p = eq(col(t.y), col(t.x));
    Plan dj = plan::dependent_join(true_literal(), t.r, plan::select(p, t.s));
    Plan out = simple_djoin_elimination(dj);
    EXPECT_TRUE(structurally_equal(out, plan::select(p, plan::join(true_literal(), t.r, t.s))));
    EXPECT_EQ(count_kind(out, PlanKind::DependentJoin), 0u);
    expect_equivalent_on_random_data(dj, out, t);
}

TEST(SimpleElimination, HoistsMapsAndKeepsTheJoinPredicate) {
    TwoTables t;
    Attribute m = fresh_attribute("m");
    Plan right = plan::map(m, add(col(t.x), col(t.y)), plan::select(gt(col(t.y), col(t.x)), t.s));
    Plan dj = plan::dependent_join(lt(col(m), lit(3)), t.r, right);
    Plan out = simple_djoin_elimination(dj);
    EXPECT_EQ(count_kind(out, PlanKind::DependentJoin), 0u);
    expect_equivalent_on_random_data(dj, out, t);
}

TEST(SimpleElimination, GroupByBlocksHoisting) {
    TwoTables t;
    Attribute c = fresh_attribute("c");
    Plan right = plan::group_by({}, {{c, {AggKind::CountStar, {}}}}, plan::select(eq(col(t.y), col(t.x)), t.s));
    Plan dj = plan::dependent_join(true_literal(), t.r, right);
    EXPECT_EQ(simple_djoin_elimination(dj), dj);
}

TEST(SimpleElimination, UnnestedPlanIsAFixpoint) {
    TwoTables t;
    Plan p = plan::join(eq(col(t.x), col(t.y)), t.r, t.s);
    EXPECT_EQ(simple_djoin_elimination(p), p);
}

TEST(ComputeDomain, IsTheDistinctProjection) {
    Attribute x = fresh_attribute("x"), y = fresh_attribute("y");
    Relation r({x, y});
    Tuple t1, t2;
    t1.set(x, 1);
    t1.set(y, 9);
    t2.set(x, 1);
    t2.set(y, 8);
    r.add(t1);
    r.add(t2);
    Plan left = plan::scan("R", {x, y});
    Relation d = evaluate(compute_domain(left, {x}), {{"R", r}});
    EXPECT_EQ(d.count(Tuple::single(x, 1)), 1u);
    EXPECT_EQ(d.total(), 1u);
    EXPECT_TRUE(evaluate(compute_domain(left, {x, y}), {{"R", r}}).is_duplicate_free());
    EXPECT_EQ(evaluate(compute_domain(left, {x}), {{"R", Relation({x, y})}}).total(), 0u);
    EXPECT_THROW(compute_domain(left, {fresh_attribute("z")}), UnnestError);
}

class PushDownTest : public ::testing::Test {
protected:
    Attribute d = fresh_attribute("d");
    Attribute a = fresh_attribute("a");
    Attribute g = fresh_attribute("g");
    Plan dom = plan::scan("D", {d});
    Plan r = plan::scan("R", {a, g});
    UnnestingInfo info = make_unnesting_info(dom);
    Attribute rep = info.rename_map.at(d);
};

TEST_F(PushDownTest, PerfectUnnestingUsesAMap) {
    Plan sel = plan::select(eq(col(d), col(a)), r);
    Plan out = push_down(info, sel, {PerfectMode::Always});
    EXPECT_TRUE(structurally_equal(out, plan::select(eq(col(rep), col(a)), plan::map(rep, col(a), r))));
}

TEST_F(PushDownTest, AlwaysFailsWithoutAnEquivalence) {
    Plan sel = plan::select(lt(col(d), col(a)), r);
    EXPECT_THROW(push_down(info, sel, {PerfectMode::Always}), UnnestError);
    // Auto falls back to the domain join.
    Plan out = push_down(info, sel, {PerfectMode::Auto});
    EXPECT_EQ(out->child()->kind, PlanKind::Cross);
}

TEST_F(PushDownTest, GroupByGainsTheRepresentativeAsKey) {
    Attribute c = fresh_attribute("c");
    std::vector<Aggregate> aggs{{c, {AggKind::CountStar, {}}}};
    Plan gb = plan::group_by({g}, aggs, plan::select(eq(col(d), col(a)), r));
    Plan out = push_down(info, gb, {PerfectMode::Never});
    ASSERT_EQ(out->kind, PlanKind::GroupBy);
    EXPECT_EQ(out->attrs, (AttrSet{g, rep}));
    EXPECT_EQ(out->aggs, aggs);
    EXPECT_EQ(schema_of(out), (AttrSet{g, c, rep}));
}

TEST_F(PushDownTest, IndependentInputIsCrossedWithTheRenamedDomain) {
    Plan out = push_down(info, r, {PerfectMode::Never});
    EXPECT_TRUE(structurally_equal(out, plan::cross(plan::rename(rep, d, dom), r)));
}

TEST_F(PushDownTest, BothSidesDependentGetSeparateCopies) {
    Attribute b = fresh_attribute("b");
    Plan s = plan::scan("S", {b});
    Plan cross = plan::cross(plan::select(lt(col(a), col(d)), r), plan::select(gt(col(b), col(d)), s));
    UnnestStats stats;
    Plan out = push_down(info, cross, {PerfectMode::Never}, &stats);
    EXPECT_EQ(schema_of(out), (AttrSet{a, g, b, rep}));
    EXPECT_EQ(stats.join_stops, 2u);
    EXPECT_EQ(count_kind(out, PlanKind::Rename), 2u);
    EXPECT_EQ(stats.max_visits(), 1);
}

TEST_F(PushDownTest, DepthLimit) {
    Plan sel = plan::select(eq(col(d), col(a)), r);
    EXPECT_THROW(push_down(info, sel, {PerfectMode::Auto, 0}), UnnestError);
}

TEST(RewriteColumns, ReplacesDomainAttributes) {
    Attribute d = fresh_attribute("d"), a = fresh_attribute("a");
    UnnestingInfo info = make_unnesting_info(plan::scan("D", {d}));
    Attribute rep = info.rename_map.at(d);
    EXPECT_TRUE(structurally_equal(rewrite_columns(info, eq(col(d), col(a))), eq(col(rep), col(a))));
    ScalarExpr plain = eq(col(a), lit(1));
    EXPECT_EQ(rewrite_columns(info, plain), plain);
    EXPECT_EQ(free_vars_expr(rewrite_columns(info, add(col(d), col(d)))), (AttrSet{rep}));
    info.rename_map.clear();
    EXPECT_THROW(rewrite_columns(info, col(d)), UnnestError);
}

TEST(CollectEquivalences, OnlyPlainEqualityWithALocalSide) {
    Attribute d = fresh_attribute("d"), d2 = fresh_attribute("d"), x = fresh_attribute("x"), y = fresh_attribute("y");
    UnnestingInfo info = make_unnesting_info(plan::scan("D", {d, d2}));
    auto got = collect_equivalences(info, and_({eq(col(d), col(x)), lt(col(y), lit(3))}));
    ASSERT_EQ(got.equivalences.size(), 1u);
    EXPECT_TRUE(structurally_equal(got.equivalences.at(d), col(x)));
    EXPECT_TRUE(collect_equivalences(info, eq(col(d), col(d2))).equivalences.empty());
    EXPECT_TRUE(collect_equivalences(info, lt(col(d), col(x))).equivalences.empty());
    // Mirrored form, and earlier entries win.
    auto mirrored = collect_equivalences(got, eq(col(y), col(d)));
    EXPECT_TRUE(structurally_equal(mirrored.equivalences.at(d), col(x)));
    EXPECT_TRUE(collect_equivalences(info, eq(col(y), col(d))).equivalences.contains(d));
}

TEST(Unnest, PlanWithoutDependentJoinsIsUnchanged) {
    TwoTables t;
    Plan p = plan::join(eq(col(t.x), col(t.y)), t.r, t.s);
    EXPECT_EQ(unnest(p), p);
}

TEST(Unnest, CountSubqueryBecomesAGroupedJoin) {
    TwoTables t;
    Attribute c = fresh_attribute("c");
    Plan right = plan::group_by({}, {{c, {AggKind::CountStar, {}}}}, plan::select(eq(col(t.y), col(t.x)), t.s));
    Plan dj = plan::dependent_join(true_literal(), t.r, right);
    for (PerfectMode mode : {PerfectMode::Never, PerfectMode::Auto}) {
        UnnestStats stats;
        Plan out = unnest(dj, {mode}, &stats);
        EXPECT_EQ(count_kind(out, PlanKind::DependentJoin), 0u);
        EXPECT_EQ(stats.domains_built, 1u);
        ASSERT_EQ(out->kind, PlanKind::Project);
        ASSERT_EQ(out->child()->kind, PlanKind::Join);
        const Plan& gb = out->child()->right();
        ASSERT_EQ(gb->kind, PlanKind::GroupBy);
        ASSERT_EQ(gb->attrs.size(), 1u);
        EXPECT_NE(*gb->attrs.begin(), t.x);
        EXPECT_EQ(gb->attrs.begin()->base(), "x");
        expect_equivalent_on_random_data(dj, out, t);
    }
}

TEST(Unnest, DepthLimitAppliesToNestedDomains) {
    PlanScript s = parse_script(
        "table R rel (a) { (1) (2) }\n"
        "table S rel (b) { (1) (NULL) }\n"
        "table T rel (c) { (1) (2) x2 }\n"
        "plan\n"
        "(djoin true (scan R)\n"
        "  (djoin true (select (= b a) (scan S))\n"
        "    (groupby () ((n count*)) (select (and (= c a) (= c b)) (scan T)))))");
    ASSERT_EQ(count_kind(s.plan, PlanKind::DependentJoin), 2u);
    EXPECT_THROW(unnest(s.plan, {PerfectMode::Auto, 1}), UnnestError);
    Plan u = unnest(s.plan, {PerfectMode::Auto, 2});
    EXPECT_EQ(evaluate(u, s.catalog), evaluate(s.plan, s.catalog));
}

TEST(Unnest, IntroQueryFixture) {
    PlanScript s = parse_script(read_file(DECORR_FIXTURE_DIR "/intro_query.plan"));
    Relation golden = parse_relation(read_file(DECORR_FIXTURE_DIR "/intro_query.expected.rel"));
    Relation naive = evaluate(s.plan, s.catalog);
    EXPECT_TRUE(equal_up_to_renaming(naive, golden)) << print_relation(naive);
    for (PerfectMode mode : {PerfectMode::Never, PerfectMode::Auto}) {
        UnnestStats stats;
        Plan u = unnest(s.plan, {mode}, &stats);
        EXPECT_EQ(count_kind(u, PlanKind::DependentJoin), 0u);
        EXPECT_EQ(stats.max_visits(), 1);
        EXPECT_EQ(stats.domains_built, 2u);
        EXPECT_EQ(evaluate(u, s.catalog), naive);
        EXPECT_TRUE(structurally_equal(unnest(u, {mode}), u));
    }
}

TEST(Unnest, GeneratedPlansSmoke) {
    GenSpec spec;
    spec.seed = 5;
    for (PerfectMode mode : {PerfectMode::Never, PerfectMode::Auto}) {
        EquivalenceReport r = run_fuzz(60, spec, {mode});
        EXPECT_TRUE(r.passed()) << report_text(r);
    }
}
