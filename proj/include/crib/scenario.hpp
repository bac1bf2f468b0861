#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crib/envelope.hpp"

namespace crib {

inline constexpr const char* kOutputDirEnv = "CRIB_OUTPUT_DIR";

struct AssertionResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<=" or ">=".
  std::string op;
  bool pass = false;
};

struct ScenarioResult {
  std::string scenario;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<AssertionResult> assertions;
  /// (file name, contents), written only after the run completes.
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::vector<std::string> warnings;

  bool passed() const noexcept;
  nlohmann::ordered_json summary() const;
};

/// Parses a JSON file; syntax errors raise ErrorKind::Schema.
nlohmann::json load_config(const std::filesystem::path& path);

/// Full schema check (required sections, types, unknown keys). Throws ErrorKind::Schema.
void validate_config(const nlohmann::json& config);

/// Validates, then runs. Relative paths inside the config resolve against base_dir.
ScenarioResult run_scenario(const nlohmann::json& config, unsigned threads = 1,
                            const std::filesystem::path& base_dir = {});

/// --out beats the config's output_dir, which beats $CRIB_OUTPUT_DIR, then "crib_out".
std::filesystem::path resolve_output_dir(const nlohmann::json& config, const std::optional<std::string>& cli_out);

/// summary.json plus every artifact.
void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir);

struct CompareReport {
  double fidelity = 0.0;
  double max_abs_deviation = 0.0;
  double overlap_phase = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Passes when 1 - fidelity <= tolerance. Throws when the traces share no time range.
CompareReport compare_traces(const SampledEnvelope& a, const SampledEnvelope& b, double tolerance);

}  // namespace crib
