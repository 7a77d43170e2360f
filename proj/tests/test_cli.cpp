/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace decorr;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string kFixture = DECORR_FIXTURE_DIR "/intro_query.plan";

} // namespace

TEST(Cli, CheckFixturePrintsIdenticalRelations) {
    CliResult r = run({"check", kFixture});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("identical"), std::string::npos);
    EXPECT_NE(r.out.find("(1 \"AUTOMOBILE\")"), std::string::npos);
}

TEST(Cli, UnnestPrintsAPlanWithoutDependentJoins) {
    for (const char* mode : {"--perfect=never", "--perfect=auto"}) {
        CliResult r = run({"unnest", kFixture, mode});
        EXPECT_EQ(r.code, kExitOk) << r.err;
        EXPECT_EQ(r.out.find("djoin"), std::string::npos);
        EXPECT_NE(r.out.find("(groupby"), std::string::npos);
    }
}

TEST(Cli, EvalAndJson) {
    CliResult r = run({"eval", kFixture, "--json"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.rfind("{\"relation\":", 0), 0u);
}

TEST(Cli, Lemmas) {
    CliResult r = run({"lemmas", "--only", "L3.1", "--trials", "200", "--seed", "7"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "L3.1: 200/200 trials passed\n");
    EXPECT_EQ(run({"lemmas", "--only", "L0.0"}).code, kExitUsage);
}

TEST(Cli, FuzzWithJobs) {
    CliResult r = run({"fuzz", "--trials", "40", "--seed", "3", "--jobs", "2", "--json"});
    EXPECT_EQ(r.code, kExitOk) << r.out;
    EXPECT_NE(r.out.find("\"passed\":true"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({"eval", "missing.plan"}).code, kExitUsage);
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"unnest", kFixture, "--perfect=sometimes"}).code, kExitUsage);
}

TEST(Cli, PerfectAlwaysAcceptsEqualityCorrelations) {
    EXPECT_EQ(run({"unnest", kFixture, "--perfect=always"}).code, kExitOk);
}
