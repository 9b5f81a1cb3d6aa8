#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "brl/data/dataset.hpp"
#include "brl/envs/rewards.hpp"
#include "brl/offline/policy.hpp"

namespace brl {

struct TrainOptions {
  Td3Config td3;
  BcqConfig bcq;
  std::size_t log_every = 1000;
  std::string config_hash;
};

// Means over the preceding logging window. actor_loss averages only the steps
// with an actor update; aux_loss is the BCQ generator loss (NaN for TD3).
struct LossRow {
  std::size_t step = 0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double aux_loss = 0.0;
};

struct TrainResult {
  OfflinePolicy policy;
  std::vector<LossRow> log;
};

// Freshly initialized learner for `spec`; draws from `rng` exactly as
// train_offline does before its first update.
OfflinePolicy make_offline_policy(const EnvSpec& spec, OfflineAlgorithm algo,
                                  const TrainOptions& options, Rng& rng);

// `steps` updates on relabeled minibatches. Touches no environment.
// DivergenceError messages are prefixed with the failing step.
TrainResult train_offline(const Dataset& dataset, const TaskReward& reward, std::string_view algo,
                          std::size_t steps, std::uint64_t seed, const TrainOptions& options = {});

// "# key=value ..." provenance line, then step,critic_loss,actor_loss,aux_loss.
void write_loss_csv(std::ostream& out, const std::vector<LossRow>& rows, const std::string& provenance);

}  // namespace brl
