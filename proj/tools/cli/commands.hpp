#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evocalc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kCheckFailed = 2,
  kNumericalFailure = 3,
};

// args excludes the program name. Errors go to err as a JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evocalc::cli
