#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brl/envs/environment.hpp"
#include "brl/explore/agent.hpp"
#include "brl/explore/linear_policy.hpp"

namespace brl {

struct GepEntry {
  LinearPolicy policy;
  // Element-wise mean of the states visited by the policy's trajectory.
  Vector descriptor;
};

struct GepMemory {
  std::vector<GepEntry> entries;
  std::size_t bootstrap_target = 50;

  bool bootstrapped() const { return entries.size() >= bootstrap_target; }
};

struct GepConfig {
  std::size_t bootstrap_episodes = 50;
  double init_sigma = 1.0;
  double perturb_sigma = 0.1;
};

// Index of the entry whose descriptor is nearest (Euclidean) to `goal`; ties
// resolve to the lowest index. Throws UsageError on an empty memory.
std::size_t gep_nearest(const GepMemory& memory, std::span<const double> goal);

// Nearest entry's policy plus N(0, sigma^2) noise on every parameter. Throws
// PhaseError before the bootstrap phase is complete.
LinearPolicy gep_select_and_perturb(const GepMemory& memory, std::span<const double> goal,
                                    Rng& rng, double sigma = 0.1);

// Uniform draw inside [low, high] per dimension.
Vector gep_sample_goal(std::span<const double> low, std::span<const double> high, Rng& rng);

class GepExplorer final : public Explorer {
 public:
  GepExplorer(const EnvSpec& spec, GepConfig config = {});

  std::string method() const override { return "gep"; }
  void begin_episode(Rng& rng) override;
  Vector act(std::span<const double> obs, Rng& rng) override;
  void observe(const Transition& t, Rng& rng) override;

  const GepMemory& memory() const { return memory_; }
  // Running per-dimension min/max over every state seen so far.
  const Vector& state_low() const { return low_; }
  const Vector& state_high() const { return high_; }

 private:
  void see_state(std::span<const double> x);
  void close_episode();

  EnvSpec spec_;
  GepConfig config_;
  GepMemory memory_;
  LinearPolicy policy_;
  Vector state_sum_;
  std::size_t state_count_ = 0;
  bool episode_open_ = false;
  Vector low_;
  Vector high_;
};

}  // namespace brl
