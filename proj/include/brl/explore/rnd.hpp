#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brl/core/adam.hpp"
#include "brl/core/mlp.hpp"
#include "brl/explore/learner_explorer.hpp"
#include "brl/explore/sac.hpp"

namespace brl {

struct RndConfig {
  std::size_t embed_dim = 32;
  std::vector<std::size_t> hidden{64};
  AdamConfig opt{1e-3};
};

// Random network distillation: a frozen random teacher embedding and a
// student trained to match it. Novelty is the embedding mismatch.
struct RndModule {
  Mlp teacher;
  Mlp student;
  AdamState student_opt;

  RndModule(std::size_t obs_dim, const RndConfig& config, Rng& rng);
};

// ||teacher(x) - student(x)||
double rnd_reward(const RndModule& module, std::span<const double> x);
Matrix rnd_rewards(const RndModule& module, const Matrix& x);  // B x 1

// One Adam step on mean_i ||teacher(x_i) - student(x_i)||^2. Returns the loss
// before the step.
double rnd_update(RndModule& module, const Matrix& x);

class RndExplorer final : public LearnerExplorer {
 public:
  RndExplorer(const EnvSpec& spec, const RndConfig& rnd, const SacConfig& sac,
              LearnerSchedule schedule, Rng& rng);

  std::string method() const override { return "rnd"; }
  const RndModule& module() const { return module_; }
  const SacAgent& agent() const { return agent_; }

 protected:
  Vector policy_action(std::span<const double> obs, Rng& rng) override;
  void learn(std::span<const std::size_t> indices, Rng& rng) override;

 private:
  RndModule module_;
  SacAgent agent_;
};

}  // namespace brl
