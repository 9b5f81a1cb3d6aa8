#pragma once

#include <cstddef>

#include "brl/data/dataset.hpp"
#include "brl/envs/environment.hpp"
#include "brl/explore/agent.hpp"

namespace brl {

// Update cadence shared by the learning explorers.
struct LearnerSchedule {
  // Uniform random actions (and no updates) for this many steps.
  std::size_t warmup_steps = 500;
  std::size_t batch_size = 128;
  std::size_t update_every = 1;
};

// Common plumbing for explorers that learn online: an internal replay of every
// observed transition and a warm-up/update schedule.
class LearnerExplorer : public Explorer {
 public:
  Vector act(std::span<const double> obs, Rng& rng) final;
  void observe(const Transition& t, Rng& rng) final;

  const Dataset& replay() const { return replay_; }
  std::size_t updates() const { return updates_; }

 protected:
  LearnerExplorer(const EnvSpec& spec, LearnerSchedule schedule);

  virtual Vector policy_action(std::span<const double> obs, Rng& rng) = 0;
  // Runs one learning update on the given replay indices.
  virtual void learn(std::span<const std::size_t> indices, Rng& rng) = 0;
  virtual void record(const Transition& /*t*/) {}

  const EnvSpec& spec() const { return spec_; }

 private:
  EnvSpec spec_;
  LearnerSchedule schedule_;
  Dataset replay_;
  std::size_t steps_ = 0;
  std::size_t updates_ = 0;
};

// Replay rows as batch matrices (reward column zero).
LabeledBatch gather_batch(const Dataset& dataset, std::span<const std::size_t> indices);

}  // namespace brl
