#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "rmt/inference.hpp"
#include "rmt/montecarlo.hpp"

namespace rmt {

// Matrix files are headerless, row-major CSV in decimal notation; the shape is
// inferred from the row count and the (common) field count.

/// Throws InvalidInput naming the path and line on any parse problem.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
std::string format_matrix_csv(const Eigen::MatrixXd& A);

/// Writes to a sibling temporary file and renames it into place, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::json to_json(const VectorSpec& spec);
VectorSpec vector_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NoiseProfile& noise);
NoiseProfile noise_from_json(const nlohmann::json& j);

/// Round trip: config_from_json(to_json(c)) reproduces c. Unknown keys and
/// mistyped values are rejected with InvalidInput.
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const McReport& report);
McReport report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CumulantSet& k);
nlohmann::json to_json(const AsymptoticLaw& law);
nlohmann::json to_json(const TestOutcome& outcome);

}  // namespace rmt
