#pragma once

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chaoslab::cli {

enum ExitCode { kOk = 0, kVerdictFailed = 1, kUsage = 2 };

/// Files produced by one command, keyed by name relative to the output
/// directory. Nothing touches the disk until the command has finished.
struct Outcome {
  int exit_code = kOk;
  std::map<std::string, std::string> files;
  std::string summary;
};

/// Commands: simulate, verify, analyze <kind>, scan, kneading.
std::vector<std::string> commands();

/// Defaults for every key a command accepts.
nlohmann::json default_config(const std::string& command);

/// Overlays `user` on the defaults; unknown keys and type mismatches throw
/// ConfigError naming the key.
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& user);

/// Runs a command on a resolved configuration.
Outcome execute(const std::string& command, const nlohmann::json& config);

/// Full command line (argv[0] excluded). Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaoslab::cli
