#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace swnudge {

// Options shared by the subcommands. config_path empty means "all defaults".
struct CliOptions {
  std::string config_path;
  std::string out_dir = "swnudge_out";
  std::optional<std::uint64_t> seed;  // overrides [noise] seed when set
  int jobs = 1;
  int modes = 64;  // spectral resolution for the `spectral` subcommand
};

// Subcommand entry points, exposed separately so tests can drive them
// without going through argv parsing. Each returns a process exit code:
//   0 success, 1 config/usage error, 2 numerical failure,
//   3 kernel assumption violation, 4 equivariance violation.
int cmd_run(const CliOptions& opt);
int cmd_sweep(const CliOptions& opt);
int cmd_spectral(const CliOptions& opt);
int cmd_invariance(const CliOptions& opt);

// Parses argv and dispatches. This is main() minus the process boundary.
int run_cli(int argc, const char* const* argv);

}  // namespace swnudge
