#include "chaoslab/io/manifest.hpp"

#include "chaoslab/core/errors.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace chaoslab::io {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& f : m.outputs) outputs.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"command", m.command},   {"config", m.config},     {"code_version", m.code_version},
          {"seed", m.seed},         {"started", m.started},   {"finished", m.finished},
          {"outputs", outputs}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("manifest", "manifest must be a JSON object");
  RunManifest m;
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ConfigError(key, std::string("manifest is missing '") + key + "'");
    return j[key];
  };
  try {
    m.command = field("command").get<std::string>();
    m.config = field("config");
    m.code_version = field("code_version").get<std::string>();
    m.seed = field("seed").get<std::uint64_t>();
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    for (const auto& f : field("outputs"))
      m.outputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                           f.value("bytes", std::uintmax_t{0})});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", std::string("malformed manifest: ") + e.what());
  }
  if (!m.config.is_object()) throw ConfigError("config", "manifest config must be a JSON object");
  return m;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::filesystem::path& path, const std::string& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(key, "cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json read_json_file(const std::filesystem::path& path, const std::string& key) {
  try {
    return nlohmann::json::parse(read_file(path, key));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(key, "invalid JSON in '" + path.string() + "': " + e.what());
  }
}

}  // namespace chaoslab::io
