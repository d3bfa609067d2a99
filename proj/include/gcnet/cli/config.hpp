#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace gcnet::cli {

/// INI-style configuration (`key = value` lines grouped under `[section]` headers,
/// comment lines start with ';' or '#'). Every value read through a getter, including
/// defaults, is recorded so the resolved configuration can be written to a manifest.
class Config {
 public:
  using Sections = std::map<std::string, std::map<std::string, std::string>>;

  Config() = default;
  explicit Config(Sections sections) : values_(std::move(sections)) {}

  static Config parse_ini(const std::string& text, const std::string& origin = "<string>");
  /// INI file, or a run manifest (JSON) whose "config" object is used.
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Sets the value only when the key is absent.
  void set_default(const std::string& section, const std::string& key, const std::string& value);

  /// Lower-priority values (a built-in profile) consulted when a key is absent.
  void set_defaults(Sections defaults) { defaults_ = std::move(defaults); }

  std::string get_string(const std::string& section, const std::string& key);
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback);
  double get_double(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key, double fallback);
  std::int64_t get_int(const std::string& section, const std::string& key);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& section, const std::string& key, std::uint64_t fallback);
  std::vector<double> get_doubles(const std::string& section, const std::string& key);
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback);
  std::vector<std::string> get_list(const std::string& section, const std::string& key);
  /// Path value resolved against the config file's directory; the resolved form is
  /// written back so the snapshot is independent of the working directory.
  std::filesystem::path get_path(const std::string& section, const std::string& key);

  /// Throws ConfigError listing keys of `section` that no getter has read, apart from
  /// `ignored` (keys meant for another subcommand sharing the file).
  void reject_unknown(const std::string& section, const std::set<std::string>& ignored = {}) const;

  const Sections& sections() const { return values_; }
  /// Path the configuration was loaded from; relative paths in values resolve against its directory.
  const std::filesystem::path& origin() const { return origin_; }
  std::filesystem::path resolve_path(const std::string& value) const;

  /// Manifest this configuration came from, if any.
  const std::optional<nlohmann::json>& manifest() const { return manifest_; }

  /// Snapshot of the given sections (all sections when empty).
  nlohmann::json to_json(const std::vector<std::string>& sections = {}) const;

 private:
  const std::string& raw(const std::string& section, const std::string& key);

  Sections values_;
  Sections defaults_;
  std::set<std::pair<std::string, std::string>> used_;
  std::filesystem::path origin_;
  std::optional<nlohmann::json> manifest_;
};

std::vector<std::string> split_list(const std::string& value);

}  // namespace gcnet::cli
