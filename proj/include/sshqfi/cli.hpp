#pragma once

#include <string>
#include <vector>

namespace sshqfi {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kExitSuccess = 0,
  kExitInvalidInput = 2,
  kExitPhysicsGuard = 3,
  kExitNumericalFailure = 4,
};

/// Entry point of the `sshqfi` tool.
int run_cli(int argc, char** argv);

/// Same, with arguments excluding the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace sshqfi
