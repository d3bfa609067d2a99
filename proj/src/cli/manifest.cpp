#include "gcnet/cli/manifest.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "gcnet/common/error.hpp"

#ifndef GCNET_VERSION
#define GCNET_VERSION "0.0.0"
#endif

namespace gcnet::cli {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      EVP_MD_CTX_free(ctx_);
      throw IoError("sha256: digest initialisation failed");
    }
  }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  ~Sha256() { EVP_MD_CTX_free(ctx_); }

  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, data, n) != 1) throw IoError("sha256: update failed");
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md.data(), &len) != 1) throw IoError("sha256: finalisation failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

nlohmann::json files_to_json(const std::map<std::string, std::pair<std::string, std::string>>& files) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [role, entry] : files) j[role] = {{"path", entry.first}, {"sha256", entry.second}};
  return j;
}

std::map<std::string, std::pair<std::string, std::string>> files_from_json(const nlohmann::json& j) {
  std::map<std::string, std::pair<std::string, std::string>> out;
  if (j.is_null()) return out;
  for (const auto& [role, entry] : j.items())
    out[role] = {entry.at("path").get<std::string>(), entry.at("sha256").get<std::string>()};
  return out;
}

}  // namespace

const char* tool_version() { return GCNET_VERSION; }

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read error while hashing " + path.string());
  return h.hex();
}

std::string sha256_bytes(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
  inputs[role] = {path.string(), sha256_file(path)};
}

void RunManifest::add_output(const std::string& role, const std::filesystem::path& path) {
  outputs[role] = {path.string(), sha256_file(path)};
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = tool;
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["config"] = config;
  j["inputs"] = files_to_json(inputs);
  j["outputs"] = files_to_json(outputs);
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config");
    m.inputs = files_from_json(j.value("inputs", nlohmann::json()));
    m.outputs = files_from_json(j.value("outputs", nlohmann::json()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed manifest: {}", e.what()));
  }
  return m;
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return from_json(j);
}

void verify_inputs(const RunManifest& manifest) {
  for (const auto& [role, entry] : manifest.inputs) {
    const std::filesystem::path p(entry.first);
    if (!std::filesystem::exists(p)) throw IoError(fmt::format("manifest input '{}' is missing: {}", role, entry.first));
    const std::string digest = sha256_file(p);
    if (digest != entry.second)
      throw ConfigError(fmt::format("manifest input '{}' ({}) changed: sha256 {} but manifest records {}", role,
                                    entry.first, digest, entry.second));
  }
}

}  // namespace gcnet::cli
