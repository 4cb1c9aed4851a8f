#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace actorflow {

// Experiment configs are single JSON documents. Loading fills defaults,
// rejects unknown keys (recursively, naming the offending path) and echoes
// the complete effective config back into the run record.
struct ExperimentConfig {
  std::string experiment;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::size_t threads = 1;
  nlohmann::json params;  // experiment-specific section, defaults filled

  nlohmann::json effective() const;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// defaults for one experiment tag's specific section
nlohmann::json default_experiment_params(const std::string& experiment);

const std::vector<std::string>& experiment_tags();

// 16-hex-digit FNV hash of the canonical dump; prefixes every output file
std::string config_hash(const nlohmann::json& effective);

}  // namespace actorflow
