#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "reasonsum/config.hpp"
#include "reasonsum/error.hpp"

namespace reasonsum::cli {

/// Process exit codes. Stable across releases.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kAuth = 3,
  kBudget = 4,
  kBadImportRow = 5,
};

int exit_code_for(ErrorCode code) noexcept;

/// Parses `args` (without the program name) and runs one subcommand:
/// run, sweep, score, report, import-scores, stats, validate.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const config::EnvLookup& env = config::process_env);

int main(int argc, char** argv);

}  // namespace reasonsum::cli
