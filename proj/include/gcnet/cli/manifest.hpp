#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace gcnet::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(const std::string& bytes);

/// Record of one run: what was asked for and which bytes went in and came out.
/// It carries no timestamps or host details, so rerunning a manifest reproduces it.
struct RunManifest {
  std::string tool = "gcnet";
  std::string version;
  std::string subcommand;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  /// Role (for example "dataset") to {path, sha256}.
  std::map<std::string, std::pair<std::string, std::string>> inputs;
  std::map<std::string, std::pair<std::string, std::string>> outputs;

  void add_input(const std::string& role, const std::filesystem::path& path);
  void add_output(const std::string& role, const std::filesystem::path& path);

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void write(const std::filesystem::path& path) const;
  static RunManifest read(const std::filesystem::path& path);
};

/// Recomputes the digest of every recorded input and throws ConfigError naming the first
/// file whose bytes changed since the manifest was written.
void verify_inputs(const RunManifest& manifest);

const char* tool_version();

}  // namespace gcnet::cli
