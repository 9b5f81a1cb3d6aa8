#include "brl/explore/learner_explorer.hpp"

#include "brl/core/errors.hpp"

namespace brl {

LabeledBatch gather_batch(const Dataset& dataset, std::span<const std::size_t> indices) {
  EnvSpec spec;
  spec.obs_dim = dataset.obs_dim();
  return relabel(dataset, make_reward("zero", spec), indices);
}

LearnerExplorer::LearnerExplorer(const EnvSpec& spec, LearnerSchedule schedule)
    : spec_(spec), schedule_(schedule), replay_(spec.obs_dim, spec.act_dim) {
  if (schedule_.batch_size == 0 || schedule_.update_every == 0) {
    throw ConfigError("batch_size and update_every must be positive");
  }
}

Vector LearnerExplorer::act(std::span<const double> obs, Rng& rng) {
  if (steps_ < schedule_.warmup_steps) {
    Vector a(spec_.act_dim);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.uniform(spec_.action_low[i], spec_.action_high[i]);
    }
    return a;
  }
  return policy_action(obs, rng);
}

void LearnerExplorer::observe(const Transition& t, Rng& rng) {
  replay_.append(t);
  record(t);
  steps_ += 1;
  if (steps_ < schedule_.warmup_steps || steps_ % schedule_.update_every != 0) return;
  const auto idx = sample_batch(replay_, schedule_.batch_size, rng);
  learn(idx, rng);
  updates_ += 1;
}

}  // namespace brl
