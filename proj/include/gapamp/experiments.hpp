#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapamp {

/// Invalid configuration file or override. The CLI maps it to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  nlohmann::json params = nlohmann::json::object();  // defaults merged in
};

const std::vector<std::string>& experiment_names();

/// Default parameters of an experiment. Throws ConfigError for an unknown name.
nlohmann::json default_params(const std::string& experiment);

/// Parses and validates a config document. Top-level keys: experiment
/// (required), seed, output_dir, params. Unknown keys at either level and
/// type mismatches against the defaults are rejected.
///
/// Each override is "key=value" and replaces a scalar param (or seed /
/// output_dir); the value is read as JSON when it parses, otherwise as a string.
ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});

struct RunOutcome {
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> failures;  // one line per violated invariant
  bool ok() const { return failures.empty(); }
};

/// Worker count: GAPAMP_THREADS if set to a positive integer, else the hardware count.
int worker_count();

/// Runs the experiment and writes its CSV / JSON artifacts (and failures.txt
/// when an invariant fails) into config.output_dir.
RunOutcome run_experiment(const ExperimentConfig& config);

}  // namespace gapamp
