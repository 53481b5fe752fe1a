#pragma once

#include "vsd/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vsd::cli {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDivergence = 4;

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

const std::vector<std::string>& command_names();

/// Loads the config, applies overrides, runs the command and maps errors to
/// exit codes. Diagnostics go to `err`, progress and tables to `out`.
int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                std::ostream& out, std::ostream& err);

/// Runs a command on an already resolved config. Returns kExitOk, or
/// kExitOther when an oracle check reports FAIL. Throws on errors.
int dispatch(const std::string& command, const RunConfig& config, std::ostream& out);

}  // namespace vsd::cli
