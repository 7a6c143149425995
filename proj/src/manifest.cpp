#include "spincount/manifest.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/core.h>
#include <json.hpp>

#include "spincount/config.hpp"

#ifndef SPINCOUNT_VERSION
#define SPINCOUNT_VERSION "0.0.0"
#endif

namespace spincount {

using nlohmann::json;

std::string tool_version() { return SPINCOUNT_VERSION; }

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

std::string RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["arguments"] = arguments;
  j["config_hash"] = config_hash;
  j["config"] = json::parse(config);
  // Seeds are 64-bit; store as a string so JSON readers keep every bit.
  j["seed"] = std::to_string(seed);
  j["workers"] = workers;
  j["format"] = format;
  j["strict"] = strict;
  j["spin"] = spin ? json(*spin) : json(nullptr);
  j["field_map_hash"] = field_map_hash;
  j["tool_version"] = tool_version;
  j["started"] = started;
  j["finished"] = finished;
  j["exit_code"] = exit_code;
  j["outputs"] = json::array();
  for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"hash", o.hash}, {"bytes", o.bytes}});
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("manifest: {}", e.what()));
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.arguments = j.at("arguments").get<std::vector<std::string>>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config").dump(2) + "\n";
    m.seed = std::stoull(j.at("seed").get<std::string>());
    m.workers = j.at("workers").get<std::size_t>();
    m.format = j.at("format").get<std::string>();
    m.strict = j.at("strict").get<bool>();
    if (!j.at("spin").is_null()) m.spin = j.at("spin").get<std::uint32_t>();
    m.field_map_hash = j.value("field_map_hash", "");
    m.tool_version = j.at("tool_version").get<std::string>();
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    m.exit_code = j.value("exit_code", 0);
    for (const auto& o : j.at("outputs")) {
      m.outputs.push_back({o.at("path").get<std::string>(), o.at("hash").get<std::string>(),
                           o.at("bytes").get<std::uintmax_t>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("manifest: {}", e.what()));
  } catch (const std::logic_error& e) {
    throw ConfigError(fmt::format("manifest: bad seed: {}", e.what()));
  }
  return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read manifest {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void RunManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << to_json();
}

ExperimentConfig RunManifest::verified_config() const {
  ExperimentConfig c = load_experiment_config(config);
  const std::string h = spincount::config_hash(c);
  if (h != config_hash) {
    throw ConfigError(fmt::format("manifest config hash {} does not match its config ({})", config_hash, h));
  }
  return c;
}

}  // namespace spincount
