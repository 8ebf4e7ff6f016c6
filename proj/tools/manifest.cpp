#include "manifest.hpp"

#include "rmt/designs.hpp"
#include "rmt/io.hpp"

namespace rmt::cli {

RunManifest::RunManifest(std::string command, std::optional<std::uint64_t> seed)
    : start_(std::chrono::steady_clock::now()) {
  doc_["command"] = std::move(command);
  doc_["version"] = RMT_VERSION;
  doc_["reference_data_version"] = reference_version();
  doc_["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  doc_["configs"] = nlohmann::json::object();
  doc_["outputs"] = nlohmann::json::array();
}

void RunManifest::add_config(const std::string& label, nlohmann::json config) {
  doc_["configs"][label] = std::move(config);
}

void RunManifest::set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }

void RunManifest::stage(const std::filesystem::path& path, std::string content) {
  doc_["outputs"].push_back({{"path", path.string()}, {"bytes", content.size()}});
  staged_.emplace_back(path, std::move(content));
}

void RunManifest::commit(const std::filesystem::path& manifest_path) {
  const auto elapsed = std::chrono::steady_clock::now() - start_;
  doc_["wall_time_seconds"] = std::chrono::duration<double>(elapsed).count();
  for (const auto& [path, content] : staged_) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_file_atomic(path, content);
  }
  if (manifest_path.has_parent_path()) std::filesystem::create_directories(manifest_path.parent_path());
  write_file_atomic(manifest_path, doc_.dump(2) + "\n");
}

}  // namespace rmt::cli
