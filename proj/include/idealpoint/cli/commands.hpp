#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idealpoint::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kIo = 2,
    kValidation = 3,
    kNumerical = 4,
    kInternal = 5,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

} // namespace idealpoint::cli
