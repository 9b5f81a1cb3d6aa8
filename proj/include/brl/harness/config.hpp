#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "brl/explore/collect.hpp"
#include "brl/offline/train.hpp"

namespace brl {

// One explore / train / eval / coverage / report run.
struct ExperimentConfig {
  std::string phase;
  std::string env;
  std::string method;  // exploration method
  std::string algo;    // offline learner
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::string reward;
  std::uint64_t episodes = 20;
  std::uint64_t bins = 20;
  std::uint64_t joints = 7;
  std::uint64_t max_episode_steps = 0;  // 0 keeps the environment default
  ExplorerSettings explore;
  TrainOptions train;

  // Paths never enter the config hash.
  std::string dataset;
  std::string policy;
  std::string out;
  std::string csv;
  std::vector<std::string> inputs;
};

nlohmann::ordered_json config_to_json(const ExperimentConfig& config);
// Overlays `j` onto `config`. Unknown keys and wrong types raise ConfigError.
void apply_config_json(const nlohmann::ordered_json& j, ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

// Hex FNV-1a of the canonical JSON form minus the path fields.
std::string config_hash(const ExperimentConfig& config);

EnvOptions env_options(const ExperimentConfig& config);

}  // namespace brl
