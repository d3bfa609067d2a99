#include "gcnet/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "gcnet/common/error.hpp"

namespace gcnet::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double_value(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ConfigError(fmt::format("{}: '{}' is not a number", where, text));
  return v;
}

std::int64_t parse_int_value(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(fmt::format("{}: '{}' is not an integer", where, text));
  return v;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Config Config::parse_ini(const std::string& text, const std::string& origin) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: line {}: {}", origin, e.line(), e.message()));
  }
  Sections sections;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      throw ConfigError(fmt::format("{}: key '{}' appears outside any [section]", origin, name));
    for (const auto& [key, value] : section) sections[name][key] = trim(value.data());
  }
  Config c(std::move(sections));
  c.origin_ = origin;
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}: invalid manifest JSON: {}", path.string(), e.what()));
    }
    if (!j.contains("config") || !j["config"].is_object())
      throw ConfigError(path.string() + ": manifest has no \"config\" object");
    Sections sections;
    for (const auto& [name, section] : j["config"].items()) {
      if (!section.is_object()) throw ConfigError(fmt::format("{}: config section '{}' is not an object", path.string(), name));
      for (const auto& [key, value] : section.items()) {
        if (!value.is_string()) throw ConfigError(fmt::format("{}: config value {}.{} is not a string", path.string(), name, key));
        sections[name][key] = value.get<std::string>();
      }
    }
    Config c(std::move(sections));
    c.origin_ = path;
    c.manifest_ = std::move(j);
    return c;
  }
  Config c = parse_ini(text, path.string());
  c.origin_ = path;
  return c;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

void Config::set_default(const std::string& section, const std::string& key, const std::string& value) {
  if (!has(section, key)) set(section, key, value);
}

const std::string& Config::raw(const std::string& section, const std::string& key) {
  if (!has(section, key)) {
    const auto d = defaults_.find(section);
    if (d != defaults_.end() && d->second.count(key) > 0) values_[section][key] = d->second.at(key);
  }
  const auto s = values_.find(section);
  if (s == values_.end() || s->second.count(key) == 0)
    throw ConfigError(fmt::format("missing required setting [{}] {}", section, key));
  used_.insert({section, key});
  return s->second.at(key);
}

std::string Config::get_string(const std::string& section, const std::string& key) { return raw(section, key); }

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) {
  set_default(section, key, fallback);
  return raw(section, key);
}

double Config::get_double(const std::string& section, const std::string& key) {
  return parse_double_value(raw(section, key), fmt::format("[{}] {}", section, key));
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) {
  set_default(section, key, format_double(fallback));
  return get_double(section, key);
}

std::int64_t Config::get_int(const std::string& section, const std::string& key) {
  return parse_int_value(raw(section, key), fmt::format("[{}] {}", section, key));
}

std::int64_t Config::get_int(const std::string& section, const std::string& key, std::int64_t fallback) {
  set_default(section, key, std::to_string(fallback));
  return get_int(section, key);
}

std::uint64_t Config::get_uint(const std::string& section, const std::string& key, std::uint64_t fallback) {
  set_default(section, key, std::to_string(fallback));
  const std::string t = trim(raw(section, key));
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(fmt::format("[{}] {}: '{}' is not a non-negative integer", section, key, t));
  return v;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(raw(section, key)))
    out.push_back(parse_double_value(item, fmt::format("[{}] {}", section, key)));
  return out;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) {
  std::string joined;
  for (std::size_t i = 0; i < fallback.size(); ++i) joined += (i ? ", " : "") + format_double(fallback[i]);
  set_default(section, key, joined);
  return get_doubles(section, key);
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key) {
  return split_list(raw(section, key));
}

void Config::reject_unknown(const std::string& section, const std::set<std::string>& ignored) const {
  const auto s = values_.find(section);
  if (s == values_.end()) return;
  std::string unknown;
  for (const auto& [key, value] : s->second)
    if (used_.count({section, key}) == 0 && ignored.count(key) == 0) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw ConfigError(fmt::format("unknown setting(s) in [{}]: {}", section, unknown));
}

std::filesystem::path Config::resolve_path(const std::string& value) const {
  std::filesystem::path p(value);
  if (p.is_absolute() || manifest_) return p;
  return origin_.has_parent_path() ? origin_.parent_path() / p : p;
}

std::filesystem::path Config::get_path(const std::string& section, const std::string& key) {
  const std::string value = get_string(section, key);
  if (value.empty()) throw ConfigError(fmt::format("[{}] {} is empty", section, key));
  const std::filesystem::path p = std::filesystem::absolute(resolve_path(value)).lexically_normal();
  set(section, key, p.string());
  return p;
}

nlohmann::json Config::to_json(const std::vector<std::string>& sections) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, section] : values_) {
    if (!sections.empty() && std::find(sections.begin(), sections.end(), name) == sections.end()) continue;
    for (const auto& [key, value] : section) j[name][key] = value;
  }
  return j;
}

}  // namespace gcnet::cli
