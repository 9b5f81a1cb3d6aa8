#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brl/core/adam.hpp"
#include "brl/core/mlp.hpp"
#include "brl/explore/learner_explorer.hpp"
#include "brl/explore/sac.hpp"

namespace brl {

struct DiaynConfig {
  std::size_t n_skills = 8;
  std::vector<std::size_t> disc_hidden{64};
  AdamConfig disc_opt{3e-4};
};

// One max-entropy agent per skill plus a discriminator over skills. The
// discriminator network emits logits; probabilities are its softmax.
struct SkillEnsemble {
  std::vector<SacAgent> skills;
  Mlp discriminator;
  AdamState disc_opt;

  SkillEnsemble(const EnvSpec& spec, const DiaynConfig& config, const SacConfig& sac, Rng& rng);

  std::size_t n_skills() const { return skills.size(); }
  Matrix probabilities(const Matrix& x) const;   // B x n_skills, rows sum to 1
  Matrix log_probabilities(const Matrix& x) const;
};

// log P(skill | x)
double diayn_reward(const SkillEnsemble& ensemble, std::size_t skill, std::span<const double> x);
Matrix diayn_rewards(const SkillEnsemble& ensemble, std::span<const std::size_t> skills,
                     const Matrix& x);  // B x 1

// Mean cross-entropy of the discriminator on labeled states.
double discriminator_loss(const SkillEnsemble& ensemble, const Matrix& x,
                          std::span<const std::size_t> skills);
// One cross-entropy Adam step; returns the loss before the step.
double discriminator_update(SkillEnsemble& ensemble, const Matrix& x,
                            std::span<const std::size_t> skills);

struct SkillBatch {
  LabeledBatch data;
  std::vector<std::size_t> skills;
};

struct DiaynLosses {
  double discriminator = 0.0;
  // Per skill; skills absent from the batch keep zero losses and untouched
  // parameters.
  std::vector<SacLosses> skills;
  std::vector<bool> updated;
};

// Discriminator step on next-states, then one actor-critic step per skill on
// the rows labeled with that skill, rewarded by diayn_reward at next_obs.
DiaynLosses diayn_update(SkillEnsemble& ensemble, const SkillBatch& batch, Rng& rng);

class DiaynExplorer final : public LearnerExplorer {
 public:
  DiaynExplorer(const EnvSpec& spec, const DiaynConfig& config, const SacConfig& sac,
                LearnerSchedule schedule, Rng& rng);

  std::string method() const override { return "diayn"; }
  void begin_episode(Rng& rng) override;

  std::size_t current_skill() const { return skill_; }
  const SkillEnsemble& ensemble() const { return ensemble_; }
  const std::vector<std::size_t>& skill_labels() const { return labels_; }

 protected:
  Vector policy_action(std::span<const double> obs, Rng& rng) override;
  void learn(std::span<const std::size_t> indices, Rng& rng) override;
  void record(const Transition& t) override;

 private:
  SkillEnsemble ensemble_;
  std::size_t skill_ = 0;
  std::vector<std::size_t> labels_;
};

}  // namespace brl
