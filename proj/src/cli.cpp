/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "decorr/cli.hpp"

#include "decorr/errors.hpp"
#include "decorr/harness.hpp"
#include "decorr/plan_text.hpp"
#include "decorr/unnester.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace decorr {

namespace {

struct Options {
    std::string file;
    std::string perfect = "auto";
    bool json = false;
    int jobs = 1;
    std::string only;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Thrown for problems that map to the usage exit code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PlanScript load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_script(buf.str());
    } catch (const ParseError& e) {
        throw UsageError(path + ":" + e.what());
    } catch (const SchemaError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

UnnestConfig config(const Options& o) {
    UnnestConfig cfg;
    if (o.perfect == "auto") cfg.perfect = PerfectMode::Auto;
    else if (o.perfect == "always") cfg.perfect = PerfectMode::Always;
    else if (o.perfect == "never") cfg.perfect = PerfectMode::Never;
    else throw UsageError("--perfect must be auto, always or never");
    return cfg;
}

GenSpec gen_spec(const Options& o) {
    GenSpec spec;
    spec.seed = o.seed;
    return spec;
}

int cmd_unnest(const Options& o, std::ostream& out) {
    PlanScript s = load(o.file);
    UnnestStats stats;
    Plan u = unnest(s.plan, config(o), &stats);
    if (o.json) {
        out << nlohmann::json{{"plan", print_plan(u)},
                              {"domains", stats.domains_built},
                              {"perfect_stops", stats.perfect_stops},
                              {"join_stops", stats.join_stops}}
                   .dump()
            << "\n";
    } else {
        out << print_plan(u) << "\n";
    }
    return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
    PlanScript s = load(o.file);
    Relation r = evaluate(s.plan, s.catalog);
    if (o.json) out << nlohmann::json{{"relation", print_relation(r)}}.dump() << "\n";
    else out << print_relation(r) << "\n";
    return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
    PlanScript s = load(o.file);
    Plan u = unnest(s.plan, config(o));
    Relation before = evaluate(s.plan, s.catalog);
    Relation after = evaluate(u, s.catalog);
    auto diff = first_difference(before, after);
    if (before.columns() != after.columns()) diff = RelationDiff{};
    if (o.json) {
        nlohmann::json j{{"original", print_relation(before)}, {"unnested", print_relation(after)}, {"equal", !diff}};
        if (diff) j["diff"] = diff->str();
        out << j.dump() << "\n";
    } else {
        out << "original: " << print_relation(before) << "\n";
        out << "unnested: " << print_relation(after) << "\n";
        out << (diff ? "DIFFERENT: " + diff->str() : std::string("identical")) << "\n";
    }
    return diff ? kExitFailure : kExitOk;
}

int print_reports(const std::vector<EquivalenceReport>& reports, bool json, std::ostream& out) {
    bool ok = true;
    for (const auto& r : reports) {
        out << (json ? report_json_lines(r) : report_text(r));
        ok = ok && r.passed();
    }
    return ok ? kExitOk : kExitFailure;
}

int cmd_lemmas(const Options& o, std::ostream& out) {
    std::vector<std::string> ids = suite_ids();
    if (!o.only.empty()) {
        if (std::find(ids.begin(), ids.end(), o.only) == ids.end()) throw UsageError("unknown suite " + o.only);
        ids = {o.only};
    }
    std::vector<EquivalenceReport> reports;
    for (const auto& id : ids) reports.push_back(run_lemma_suite(id, o.trials ? o.trials : 200, gen_spec(o), Mutation::None, o.jobs));
    return print_reports(reports, o.json, out);
}

int cmd_fuzz(const Options& o, std::ostream& out) {
    return print_reports({run_fuzz(o.trials ? o.trials : 500, gen_spec(o), config(o), o.jobs)}, o.json, out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Removes dependent joins from relational algebra plans and tests the rewrites."};
    app.name("decorr");
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--perfect", o.perfect, "Use maps instead of domain joins: auto, always or never")
        ->check(CLI::IsMember({"auto", "always", "never"}));
    app.add_flag("--json", o.json, "Structured output");
    app.add_option("--jobs", o.jobs, "Parallel trials")->check(CLI::PositiveNumber);

    auto* unnest_cmd = app.add_subcommand("unnest", "Print the plan with dependent joins removed");
    unnest_cmd->add_option("FILE", o.file)->required();
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate the plan and print the result");
    eval_cmd->add_option("FILE", o.file)->required();
    auto* check_cmd = app.add_subcommand("check", "Compare the plan's result before and after unnesting");
    check_cmd->add_option("FILE", o.file)->required();
    auto* lemmas_cmd = app.add_subcommand("lemmas", "Run the randomized equivalence suites");
    lemmas_cmd->add_option("--only", o.only, "Suite id, e.g. L4.14");
    lemmas_cmd->add_option("--trials", o.trials, "Trials per suite (default 200)");
    lemmas_cmd->add_option("--seed", o.seed, "Base seed");
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Unnest generated plans and compare results");
    fuzz_cmd->add_option("--trials", o.trials, "Generated plans (default 500)");
    fuzz_cmd->add_option("--seed", o.seed, "Base seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*unnest_cmd) return cmd_unnest(o, out);
        if (*eval_cmd) return cmd_eval(o, out);
        if (*check_cmd) return cmd_check(o, out);
        if (*lemmas_cmd) return cmd_lemmas(o, out);
        return cmd_fuzz(o, out);
    } catch (const UsageError& e) {
        err << "decorr: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "decorr: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace decorr
