#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bregman::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kNoStop = 4 };

/// Entry point of the `bregman` tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bregman::cli
