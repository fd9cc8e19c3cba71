#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prs {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numeric = 2, exit_leak = 3 };

struct RunRequest {
  std::string command;  // modes, dynamics, spectrum, widthcurve, reduced, dtable
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  unsigned threads = 0;
  bool print_config = false;
};

std::vector<std::string> command_names();

/// Runs one command and returns its exit code. Reports go to `out`, errors
/// and warnings to `err`; result files land in output.directory.
int run(const RunRequest& request, std::ostream& out, std::ostream& err);

}  // namespace prs
