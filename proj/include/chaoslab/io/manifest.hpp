#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chaoslab::io {

std::string sha256_hex(std::string_view data);

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;
  nlohmann::json config;  // fully resolved, defaults included
  std::string code_version;
  std::uint64_t seed = 0;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::vector<OutputFile> outputs;
};

nlohmann::json to_json(const RunManifest& m);
/// Throws ConfigError naming the missing or mistyped field.
RunManifest manifest_from_json(const nlohmann::json& j);

std::string utc_timestamp();

/// Reads a whole file; throws ConfigError(key) when it cannot be opened.
std::string read_file(const std::filesystem::path& path, const std::string& key);
/// Parses JSON from a file; syntax errors become ConfigError(key).
nlohmann::json read_json_file(const std::filesystem::path& path, const std::string& key);

}  // namespace chaoslab::io
