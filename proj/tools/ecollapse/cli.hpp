#pragma once

#include <iosfwd>

namespace ecollapse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitBudgetError = 3,
};

/// Entry point of the `ecollapse` tool. Normal output goes to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecollapse::cli
