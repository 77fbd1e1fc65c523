#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfr::cli {

// Exit-code contract shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // validation failure or alert with --fail-on-alert
  kUsage = 2,
  kInputFormat = 3,
};

// Runs `sfr <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace sfr::cli
