#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stagger {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumeric = 3,
  kExitSelfcheck = 4,
};

// Entry point of the `stagger` tool: train, tag, eval, selfcheck, synth.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stagger
