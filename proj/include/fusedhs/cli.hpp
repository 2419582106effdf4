#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fusedhs {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

/// Entry point of the `fusedhs` tool. Subcommands: fit, simulate, loocv, tune.
int cli_main(int argc, char** argv);

/// Same, with argv[0] omitted and explicit streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fusedhs
