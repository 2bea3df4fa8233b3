#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hfspec {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNotConverged = 2 };

// Runs one subcommand. `args` excludes the program name. Results go to `out`
// unless an output path is given; diagnostics and usage go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfspec
