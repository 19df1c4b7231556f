#pragma once

#include <string>
#include <vector>

namespace gaussex {

struct CommandOutcome {
  int exit_code = 0;  ///< 0 ok, 2 usage, 3 model, 4 numeric
  std::vector<std::string> artifacts;
};

/// Entry point of the `gaussex` executable.
int run_cli(int argc, char** argv);

}  // namespace gaussex
