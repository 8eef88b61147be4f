#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "magstrip/config.hpp"

namespace magstrip {

enum ExitStatus : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfigParse = 2,
  kExitValidation = 3,
  kExitNumerical = 4,
  kExitVerificationFailed = 5,
};

int exit_status(ErrorKind kind);

struct RunResult {
  int status = kExitOk;
  std::vector<std::filesystem::path> files;
};

/// Commands that read a RunConfig: bands, effective, ssf, mourre, verify.
/// Library errors propagate; a failed verification is reported in the status.
RunResult run(const std::string& command, const RunConfig& config, std::ostream& log);

/// Names of the config-driven commands.
const std::vector<std::string>& commands();

}  // namespace magstrip
