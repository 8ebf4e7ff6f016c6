#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rmt::cli {

/// Record of one CLI invocation: enough to regenerate every listed output.
/// Outputs are staged in memory and only written by commit(), each through an
/// atomic rename, with the manifest itself last.
class RunManifest {
 public:
  RunManifest(std::string command, std::optional<std::uint64_t> seed);

  void add_config(const std::string& label, nlohmann::json config);
  void set(const std::string& key, nlohmann::json value);
  void stage(const std::filesystem::path& path, std::string content);

  /// Writes the staged outputs and then the manifest at `manifest_path`.
  void commit(const std::filesystem::path& manifest_path);

  const nlohmann::json& document() const noexcept { return doc_; }

 private:
  std::chrono::steady_clock::time_point start_;
  nlohmann::json doc_;
  std::vector<std::pair<std::filesystem::path, std::string>> staged_;
};

}  // namespace rmt::cli
