/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/errors.hpp"
#include "decorr/harness.hpp"
#include "decorr/plan_text.hpp"

#include <gtest/gtest.h>

#include <regex>

using namespace decorr;

namespace {

std::string without_ids(const std::string& text) {
    static const std::regex id("#[0-9]+");
    return std::regex_replace(text, id, "");
}

Catalog rs_catalog() {
    return {{"R", parse_relation("rel (x) { (1) (2) }")}, {"S", parse_relation("rel (y) { (1) x2 }")}};
}

} // namespace

TEST(ParseRelation, Multiplicities) {
    Relation r = parse_relation("rel (a) { (1) x3 }");
    ASSERT_EQ(r.arity(), 1u);
    EXPECT_EQ(r.columns()[0].base(), "a");
    EXPECT_EQ(r.count_row({1}), 3u);
    EXPECT_EQ(r.total(), 3u);
}

TEST(ParseRelation, NullAndStrings) {
    Relation r = parse_relation("rel (a b) { (1 NULL) (\"q\\\"x\" true) }");
    EXPECT_EQ(r.count_row({1, Value::null()}), 1u);
    EXPECT_EQ(r.count_row({"q\"x", true}), 1u);
}

TEST(ParseRelation, Errors) {
    EXPECT_THROW(parse_relation("rel (a) { (1 2) }"), ParseError);
    EXPECT_THROW(parse_relation("rel (a) { (1) x0 }"), ParseError);
    EXPECT_THROW(parse_relation("rel (a) { (1) x-2 }"), ParseError);
    EXPECT_THROW(parse_relation("rel (a a) { }"), ParseError);
    EXPECT_THROW(parse_relation("rel (a) { (1)"), ParseError);
    EXPECT_THROW(parse_relation("relation (a) { }"), ParseError);
}

TEST(PrintRelation, CanonicalForm) {
    Attribute a = fresh_attribute("a");
    Relation empty({a});
    EXPECT_EQ(print_relation(empty), "rel (" + a.str() + ") { }");
    Relation r({a});
    r.add_row({2});
    r.add_row({1}, 2);
    EXPECT_EQ(print_relation(r), "rel (" + a.str() + ") { (1) x2 (2) }");
}

TEST(PrintRelation, RoundTrip) {
    Relation r = parse_relation("rel (a b) { (NULL \"s\") x2 (1 -3) (false 0) }");
    EXPECT_TRUE(equal_up_to_renaming(parse_relation(print_relation(r)), r));
}

TEST(ParsePlan, Scan) {
    Catalog cat = rs_catalog();
    Plan p = parse_plan("(scan R)", cat);
    EXPECT_EQ(p->kind, PlanKind::Scan);
    EXPECT_EQ(schema_of(p), cat.at("R").schema());
    EXPECT_EQ(print_plan(p), "(scan R)");
}

TEST(ParsePlan, CorrelatedDependentJoin) {
    Catalog cat = rs_catalog();
    Plan p = parse_plan("(djoin true (scan R) (select (= y x) (scan S)))", cat);
    ASSERT_EQ(p->kind, PlanKind::DependentJoin);
    const Attribute x = cat.at("R").columns()[0];
    EXPECT_EQ(free_vars_plan(p->right()), (AttrSet{x}));
    EXPECT_TRUE(free_vars_plan(p).empty());
}

TEST(ParsePlan, SyntaxErrorsCarryPositions) {
    Catalog cat = rs_catalog();
    try {
        parse_plan("(select (=", cat);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 11u);
    }
    try {
        parse_plan("(select (= x 1)\n  (scan Q))", cat);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 9u);
    }
    EXPECT_THROW(parse_plan("(select (= z 1) (scan R))", cat), ParseError);
    EXPECT_THROW(parse_plan("(frobnicate (scan R))", cat), ParseError);
    EXPECT_THROW(parse_plan("(scan R) (scan S)", cat), ParseError);
    EXPECT_THROW(parse_plan("(cross (scan R) (scan R))", cat), SchemaError);
}

TEST(ParsePlan, IntroducedAttributesAreFreshAndConsistent) {
    Catalog cat = rs_catalog();
    Plan p = parse_plan("(select (> m 1) (map m (+ x 1) (scan R)))", cat);
    const Attribute m = p->child()->target;
    EXPECT_EQ(m.base(), "m");
    EXPECT_EQ(free_vars_expr(p->expr), (AttrSet{m}));
}

TEST(PrintPlan, IndentedMultiLineForm) {
    Catalog cat = rs_catalog();
    Plan p = parse_plan("(join (= x y) (scan R) (scan S))", cat);
    const std::string x = cat.at("R").columns()[0].str(), y = cat.at("S").columns()[0].str();
    EXPECT_EQ(print_plan(p), "(join (= " + x + " " + y + ")\n  (scan R)\n  (scan S))");
}

TEST(PrintPlan, ReparseIsStable) {
    Catalog cat = rs_catalog();
    const char* text =
        "(groupby (x) ((c count*) (s sum y))"
        " (outerjoin (and (<= x y) (not (is-null y))) (scan R) (nullpad (n) (scan S))))";
    Plan p1 = parse_plan(text, cat);
    Plan p2 = parse_plan(print_plan(p1), cat);
    EXPECT_TRUE(alpha_equivalent(p1, p2));
    EXPECT_EQ(without_ids(print_plan(p2)), without_ids(print_plan(p1)));
}

TEST(Script, RoundTripsThroughText) {
    PlanScript s = parse_script(
        "; two tables\n"
        "table R rel (x) { (1) (NULL) x2 }\n"
        "table S rel (y) { }\n"
        "plan\n"
        "(djoin true (scan R) (select (= y x) (scan S)))\n");
    PlanScript again = parse_script(print_script(s));
    EXPECT_TRUE(alpha_equivalent(s.plan, again.plan));
    EXPECT_TRUE(equal_up_to_renaming(s.catalog.at("R"), again.catalog.at("R")));
    EXPECT_EQ(without_ids(print_script(again)), without_ids(print_script(s)));
}

TEST(Script, AmbiguousColumnNamesMustBeQualified) {
    EXPECT_THROW(parse_script("table R rel (x) { } table S rel (x) { } plan (select (= x 1) (scan R))"),
                 ParseError);
    EXPECT_THROW(parse_script("table R rel (x) { }"), ParseError);
}

TEST(Script, GeneratedPlansRoundTrip) {
    GenSpec spec;
    for (std::uint64_t i = 0; i < 30; ++i) {
        GeneratedPlan g = gen_correlated_plan(spec, mix_seed(17, i));
        Plan back = parse_plan(print_plan(g.plan), g.catalog);
        EXPECT_TRUE(alpha_equivalent(g.plan, back)) << print_plan(g.plan);
    }
}
