#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "brl/envs/environment.hpp"
#include "brl/envs/rewards.hpp"
#include "brl/explore/agent.hpp"
#include "brl/offline/policy.hpp"

namespace brl {

struct EvalReport {
  std::vector<double> returns;
  // PlanarArm with a tooltip target only: per-episode min over time of the
  // tooltip-to-target distance. Empty otherwise.
  std::vector<double> closest_distance;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

// Runs `episodes` episodes with the agent's own actions, summing the task
// reward of every reached observation.
EvalReport evaluate(Agent& agent, const Environment& env, const TaskReward& reward,
                    std::size_t episodes, std::uint64_t seed);
// Same, after checking the policy's dimensions against `env` (ConfigError).
EvalReport evaluate(OfflinePolicy& policy, const Environment& env, const TaskReward& reward,
                    std::size_t episodes, std::uint64_t seed);

// Tooltip target of a tooltip-reach reward, if that is what `reward` is.
std::optional<std::array<double, 2>> tooltip_target(const TaskReward& reward);

// "# provenance" line, then episode,return,closest_distance.
void write_eval_csv(std::ostream& out, const EvalReport& report, const std::string& provenance);

}  // namespace brl
