/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/harness.hpp"
#include "decorr/plan_text.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

using namespace decorr;

TEST(GenRelation, Deterministic) {
    GenSpec spec;
    AttrSet schema{fresh_attribute("a"), fresh_attribute("b")};
    EXPECT_EQ(gen_relation(spec, schema, 42), gen_relation(spec, schema, 42));
}

TEST(GenRelation, Bounds) {
    GenSpec spec;
    AttrSet schema{fresh_attribute("a")};
    bool saw_null = false, saw_duplicate = false;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Relation r = gen_relation(spec, schema, seed);
        EXPECT_LE(r.distinct_size(), 6u);
        for (const auto& [row, n] : r.rows()) {
            EXPECT_GE(n, 1u);
            EXPECT_LE(n, 3u);
            saw_null |= row[0].is_null();
            saw_duplicate |= n > 1;
        }
        EXPECT_TRUE(gen_relation(spec, schema, seed, true).is_duplicate_free());
    }
    EXPECT_TRUE(saw_null);
    EXPECT_TRUE(saw_duplicate);
    spec.max_rows = 0;
    EXPECT_TRUE(gen_relation(spec, schema, 1).empty());
}

TEST(GenPlan, DeterministicAndValid) {
    GenSpec spec;
    for (std::uint64_t i = 0; i < 100; ++i) {
        GeneratedPlan g1 = gen_correlated_plan(spec, i);
        GeneratedPlan g2 = gen_correlated_plan(spec, i);
        EXPECT_TRUE(alpha_equivalent(g1.plan, g2.plan));
        EXPECT_NO_THROW(validate(g1.plan));
        EXPECT_FALSE(find_dependent_joins(g1.plan).empty());
        EXPECT_LE(count_kind(g1.plan, PlanKind::DependentJoin), 2u);
    }
}

TEST(GenPlan, CoversEveryOperatorKind) {
    GenSpec spec;
    KindHistogram h = kind_histogram(spec, 1000);
    for (std::size_t k = 0; k < kPlanKindCount; ++k)
        EXPECT_GT(h.nodes[k], 0u) << kind_name(static_cast<PlanKind>(k));
    EXPECT_GT(h.groupby_under_djoin, 0u);
}

TEST(CheckEquivalence, Reflexive) {
    GeneratedPlan g = gen_correlated_plan(GenSpec{}, 3);
    EXPECT_FALSE(check_equivalence(g.plan, g.plan, g.catalog));
}

TEST(CheckEquivalence, UnionAgainstIntersectReportsFirstTuple) {
    Attribute a = fresh_attribute("a");
    Relation r1({a}), r2({a});
    r1.add_row({1});
    r2.add_row({2});
    Catalog cat{{"R1", r1}, {"R2", r2}};
    Plan s1 = plan::scan("R1", {a}), s2 = plan::scan("R2", {a});
    auto diff = check_equivalence(plan::set_union(s1, s2), plan::intersect(s1, s2), cat);
    ASSERT_TRUE(diff);
    EXPECT_EQ(*diff, "tuple [" + a.str() + ":1]: left count 1, right count 0");
}

TEST(CheckEquivalence, EvaluationErrorsAreFailures) {
    Attribute a = fresh_attribute("a");
    Plan p = plan::scan("missing", {a});
    auto diff = check_equivalence(p, p, {});
    ASSERT_TRUE(diff);
    EXPECT_NE(diff->find("left plan failed"), std::string::npos);
}

TEST(RuleSuites, KnownIds) {
    EXPECT_EQ(core_suite_ids().size(), 20u);
    EXPECT_EQ(suite_ids().size(), 21u);
    EXPECT_THROW(run_lemma_suite("L9.9", 1, GenSpec{}), std::invalid_argument);
}

TEST(RuleSuites, NaturalJoinCountsMatchTheDirectComputation) {
    EXPECT_TRUE(run_lemma_suite("L3.2", 100, GenSpec{}).passed());
}

TEST(RuleSuites, EverySuitePassesQuickly) {
    GenSpec spec;
    spec.seed = 77;
    for (const auto& id : suite_ids()) {
        EquivalenceReport r = run_lemma_suite(id, 40, spec);
        EXPECT_TRUE(r.passed()) << report_text(r);
        EXPECT_EQ(r.trials, 40u);
    }
}

TEST(RuleSuites, MutationsAreCaughtAndShrunk) {
    GenSpec spec;
    EquivalenceReport r = run_lemma_suite("L4.12", 200, spec, Mutation::DropNaturalEquality);
    ASSERT_FALSE(r.passed());
    EXPECT_LE(r.failures[0].max_rows, spec.max_rows);
    EXPECT_FALSE(r.failures[0].left_plan.empty());
    EXPECT_FALSE(r.failures[0].inputs.empty());
}

TEST(RuleSuites, ParallelRunMatchesSequential) {
    GenSpec spec;
    EquivalenceReport seq = run_lemma_suite("L4.13", 150, spec, Mutation::ThreeValuedDomainEquality, 1);
    EquivalenceReport par = run_lemma_suite("L4.13", 150, spec, Mutation::ThreeValuedDomainEquality, 4);
    ASSERT_EQ(seq.failures.size(), par.failures.size());
    for (std::size_t i = 0; i < seq.failures.size(); ++i) {
        EXPECT_EQ(seq.failures[i].seed, par.failures[i].seed);
        EXPECT_EQ(seq.failures[i].max_rows, par.failures[i].max_rows);
    }
}

TEST(Reports, JsonLinesHaveOneRecordPerFailure) {
    EquivalenceReport r = run_lemma_suite("L4.12", 100, GenSpec{}, Mutation::DropNaturalEquality);
    const std::string text = report_json_lines(r);
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), 1 + r.failures.size());
    EXPECT_NE(report_text(r).find("FAIL seed="), std::string::npos);
}
