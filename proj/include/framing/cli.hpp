// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace framing {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

/// Runs one `framing` command. `args` excludes the program name. Human
/// readable output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace framing
