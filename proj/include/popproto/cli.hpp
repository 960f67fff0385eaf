#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "popproto/protocol.hpp"

namespace popproto {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitInconclusive = 2, kExitUsage = 3 };

/// Runs the tool on `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// A protocol file path, or one of "flock-standard(n)", "flock-binary(n)",
/// "majority(n)", "semigroup(name)".
Protocol load_protocol(const std::string& source);

}  // namespace popproto
