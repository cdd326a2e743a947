#pragma once

#include <ostream>

#include "covgeom/error.h"

namespace covgeom::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitDim = 3,
  kExitPsd = 4,
  kExitKernel = 5,
  kExitMaxIter = 6,
};

int ExitCodeFor(ErrorCode code);

/// Entry point of the `covgeom` tool. The report goes to `out`, messages to
/// `err`; the return value is the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace covgeom::cli
