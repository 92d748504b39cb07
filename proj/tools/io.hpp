#pragma once

#include <bregman/experiments.hpp>
#include <bregman/model.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace bregman::cli {

/// Bad input from the user: malformed config, unknown key, inconsistent files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// 17 significant digits: round-trips any double.
std::string format_double(double v);

/// Row-major CSV; `comment` lines are written first, each prefixed with '#'.
void write_matrix_csv(const std::string& path, const Matrix& M, const std::vector<std::string>& comment = {});
void write_vector_csv(const std::string& path, const Vector& v, const std::vector<std::string>& comment = {});
/// Skips '#' lines and blank lines; every row must have the same width.
Matrix read_matrix_csv(const std::string& path);
Vector read_vector_csv(const std::string& path);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// An experiment config plus the noise levels to sweep.
struct StudyConfig {
  ExperimentConfig base;
  std::vector<double> sigmas{1.0, 2.0, 3.0};
};

inline constexpr int kSchemaVersion = 1;

/// Parses a JSON config. Unknown keys, wrong types and a missing or
/// unsupported schema_version raise ConfigError naming the source line.
StudyConfig parse_study_config(const std::string& text, const std::string& source = "<config>");
nlohmann::ordered_json to_json(const StudyConfig& config);

nlohmann::ordered_json truth_to_json(const GroundTruth& truth, std::uint64_t seed);
GroundTruth truth_from_json(const nlohmann::json& j);

/// Pretty JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

}  // namespace bregman::cli
