#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace attrq {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitModel = 2, kExitCapacity = 3 };

/// Runs `attrq <subcommand> ...`; args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace attrq
