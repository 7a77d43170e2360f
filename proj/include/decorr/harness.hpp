/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include "decorr/evaluator.hpp"
#include "decorr/plan.hpp"
#include "decorr/relation.hpp"
#include "decorr/unnester.hpp"
#include "decorr/value.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace decorr {

/// Bounds for generated relations and plans.
struct GenSpec {
    int max_arity = 3;
    int max_rows = 6;
    int max_count = 3;
    std::vector<Value> value_pool{Value(0), Value(1), Value(2), Value::null()};
    int max_plan_depth = 4;
    int max_dependent_joins = 2;
    std::uint64_t seed = 0;
};

/// splitmix64; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic small RNG. Draws do not depend on the standard library's
/// distribution implementations, so runs replay identically everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform in [0, n); n > 0.
    std::size_t below(std::size_t n);
    /// Uniform in [lo, hi].
    int between(int lo, int hi);
    bool chance(int percent);

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

private:
    std::uint64_t state_;
};

/// A random relation over schema: up to max_rows distinct rows with counts in
/// [1, max_count] (all 1 when duplicate_free), values drawn from value_pool.
Relation gen_relation(const GenSpec& spec, const AttrSet& schema, std::uint64_t seed, bool duplicate_free = false);

struct GeneratedPlan {
    Plan plan;
    Catalog catalog;
};

/// A random valid plan over a fresh catalog, using every operator kind, with
/// between one and max_dependent_joins correlated dependent joins (possibly
/// nested). Attributes are integer-valued.
GeneratedPlan gen_correlated_plan(const GenSpec& spec, std::uint64_t seed);

/// Evaluates both plans and compares them exactly. Returns nullopt when
/// equal; otherwise a description of the first differing tuple with both
/// counts, or of the error raised while evaluating.
std::optional<std::string> check_equivalence(const Plan& p1, const Plan& p2, const Catalog& cat);

/// One failed trial.
struct TrialFailure {
    std::uint64_t seed = 0;
    std::string suite;
    std::string left_plan;
    std::string right_plan;
    std::string inputs;
    std::string diff;
    /// Bounds of the smallest configuration found that still fails.
    int max_rows = 0;
    int max_plan_depth = 0;
};

struct EquivalenceReport {
    std::string suite;
    std::size_t trials = 0;
    std::vector<TrialFailure> failures;

    bool passed() const { return failures.empty(); }
};

/// Deliberate breakage of the rewrite shapes, used to show the suites can fail.
enum class Mutation {
    None,
    /// D ▶ (R1 × R2) rewritten as (D ▶ R1) × R2.
    DropDomainReplication,
    /// Natural joins lose their equality conjuncts.
    DropNaturalEquality,
    /// Natural-join equalities use `=` (NULL never matches) instead of `<=>`.
    ThreeValuedDomainEquality,
};

const char* to_string(Mutation m);

/// Identifiers of the equivalence suites, e.g. "L3.1", "L4.14", "T4.1", "T4.1+".
const std::vector<std::string>& suite_ids();

/// The twenty suites for the proved equivalences (everything but "T4.1+").
std::vector<std::string> core_suite_ids();

/// Runs `trials` independent trials of one suite. Trial i uses seed
/// mix_seed(spec.seed, i). Throws std::invalid_argument for an unknown id.
EquivalenceReport run_lemma_suite(const std::string& id, std::size_t trials, const GenSpec& spec,
                                  Mutation mutation = Mutation::None, int jobs = 1);

/// End-to-end check over generated plans: the unnested plan has no dependent
/// join, evaluates to the same relation, is a fixpoint of unnest, and push_down
/// visited every node at most once.
EquivalenceReport run_fuzz(std::size_t trials, const GenSpec& spec, const UnnestConfig& cfg, int jobs = 1);

/// Per-kind node counts over generated plans, plus the number of plans with a
/// group-by somewhere inside the right input of a dependent join.
struct KindHistogram {
    std::array<std::size_t, kPlanKindCount> nodes{};
    std::size_t groupby_under_djoin = 0;
    std::size_t plans = 0;
};

KindHistogram kind_histogram(const GenSpec& spec, std::size_t plans);

/// Human-readable report: a summary line plus one block per failure.
std::string report_text(const EquivalenceReport& r);

/// One JSON object per line: a summary record followed by one record per failure.
std::string report_json_lines(const EquivalenceReport& r);

} // namespace decorr
