#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fbp/config.hpp"

namespace fbp {

enum class Command { certify, solve, verify, mms };

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_hypothesis = 2, exit_solver = 3 };

inline constexpr const char* software_version = "fbsolve 1.0.0";

Command parse_command(const std::string& s); // throws ConfigError

/// Runs one command and writes its artifacts into out_dir. Returns the process exit code.
int run_command(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

} // namespace fbp
