#pragma once

#include "barabanov/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace barabanov {

/// Exit codes of a run.
inline constexpr int kExitCertified = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndetermined = 2;

struct RunResult {
  nlohmann::json report;
  int exit_code = kExitCertified;
  /// Files written, relative to the output directory (report.json last).
  std::vector<std::string> files;
};

/// Executes one command, writes its files and report.json into
/// config.out_dir (created if needed) and returns the report. Library
/// errors propagate as exceptions; the CLI maps them to exit code 1.
RunResult run(const RunConfig& config);

/// Two-space indented JSON with a trailing newline.
std::string dump_report(const nlohmann::json& report);

}  // namespace barabanov
