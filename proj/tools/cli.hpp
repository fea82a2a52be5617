#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace asaedct::cli {

// Process exit codes, one per failure family.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // anything unclassified
  kUsage = 2,        // bad or missing flags
  kIoError = 3,      // unreadable or unwritable files
  kParseError = 4,   // malformed signal input
  kStreamError = 5,  // bad EEGZ stream
  kModelError = 6,   // bad checkpoint, or model/stream mismatch
  kDiverged = 7,     // training produced non-finite values
  kBadValue = 8,     // flag values rejected by the library
};

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to
/// `err` as a single line; regular output to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace asaedct::cli
