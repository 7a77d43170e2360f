/*
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace decorr {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `decorr` command line. args excludes the program name.
///
///     decorr unnest FILE            print the plan with dependent joins removed
///     decorr eval FILE              print the plan's result
///     decorr check FILE             evaluate the plan before and after unnesting
///     decorr lemmas [--only ID] [--trials N] [--seed S]
///     decorr fuzz [--trials N] [--seed S]
///
/// Common flags: --perfect=auto|always|never, --json, --jobs N.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace decorr
