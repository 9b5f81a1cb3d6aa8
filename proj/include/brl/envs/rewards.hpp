#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "brl/core/tensor.hpp"
#include "brl/envs/environment.hpp"

namespace brl {

// Stateless, state-dependent task reward applied at offline-training time.
class TaskReward {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  TaskReward(std::string name, std::string env, Vector params, std::size_t obs_dim, Fn fn);

  double operator()(std::span<const double> observation) const;

  const std::string& name() const { return name_; }
  // Environment the reward applies to; empty for environment-agnostic rewards.
  const std::string& env() const { return env_; }
  const Vector& params() const { return params_; }
  std::size_t obs_dim() const { return obs_dim_; }
  bool applies_to(std::string_view env) const;
  // Round-trips through parse: "name" or "name:p1,p2".
  std::string spec_string() const;

 private:
  std::string name_;
  std::string env_;
  Vector params_;
  std::size_t obs_dim_;
  Fn fn_;
};

// Builds a reward from "name[:p1,p2,...]" for the given environment.
// Known names: point-goal:gx,gy and velocity (pointmass), upright (pendulum),
// tooltip-reach:tx,ty (planar-arm), zero (any).
TaskReward make_reward(std::string_view spec, const EnvSpec& env);

inline double task_reward(const TaskReward& reward, std::span<const double> observation) {
  return reward(observation);
}

}  // namespace brl
