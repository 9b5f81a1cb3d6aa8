#pragma once

#include "brl/envs/environment.hpp"
#include "brl/explore/agent.hpp"
#include "brl/explore/linear_policy.hpp"

namespace brl {

// Draws a fresh random linear policy at the start of every episode.
class RandomPolicyExplorer final : public Explorer {
 public:
  RandomPolicyExplorer(const EnvSpec& spec, double init_sigma = 1.0);

  std::string method() const override { return "random"; }
  void begin_episode(Rng& rng) override;
  Vector act(std::span<const double> obs, Rng& rng) override;

  const LinearPolicy& current() const { return policy_; }

 private:
  EnvSpec spec_;
  double init_sigma_;
  LinearPolicy policy_;
};

// i.i.d. uniform action noise over the action box; a reference behavior for
// coverage comparisons.
class UniformNoiseExplorer final : public Explorer {
 public:
  explicit UniformNoiseExplorer(const EnvSpec& spec) : spec_(spec) {}

  std::string method() const override { return "noise"; }
  Vector act(std::span<const double> obs, Rng& rng) override;

 private:
  EnvSpec spec_;
};

}  // namespace brl
