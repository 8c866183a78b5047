#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qrlab::cli {

inline constexpr const char* kToolName = "qrlab";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitProperty = 3,
  kExitNumeric = 4,
};

/// Parses `args` (without the program name), runs the subcommand and writes
/// the report to `out` (or to --output). Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qrlab::cli
