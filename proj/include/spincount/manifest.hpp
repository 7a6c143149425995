#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spincount {

struct ExperimentConfig;

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string hash;  // FNV-1a of the contents
  std::uintmax_t bytes = 0;

  bool operator==(const OutputFile&) const = default;
};

/// Everything needed to reproduce one CLI run. The canonical config text is
/// embedded so a replay does not depend on the original file.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_hash;
  std::string config;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string format = "text";
  bool strict = false;
  std::optional<std::uint32_t> spin;
  std::string field_map_hash;  // empty when no field map is used
  std::string tool_version;
  std::string started;
  std::string finished;
  int exit_code = 0;
  std::vector<OutputFile> outputs;

  std::string to_json() const;
  static RunManifest from_json(std::string_view text);
  static RunManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Re-parses the embedded config; throws ConfigError when its hash does not
  /// match `config_hash`.
  ExperimentConfig verified_config() const;
};

std::string tool_version();
std::string utc_timestamp();
std::string file_hash(const std::filesystem::path& path);

}  // namespace spincount
