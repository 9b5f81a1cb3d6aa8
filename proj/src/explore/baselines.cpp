#include "brl/explore/baselines.hpp"

namespace brl {

RandomPolicyExplorer::RandomPolicyExplorer(const EnvSpec& spec, double init_sigma)
    : spec_(spec), init_sigma_(init_sigma), policy_(spec.obs_dim, spec.act_dim) {}

void RandomPolicyExplorer::begin_episode(Rng& rng) {
  policy_ = LinearPolicy::random(spec_.obs_dim, spec_.act_dim, init_sigma_, rng);
}

Vector RandomPolicyExplorer::act(std::span<const double> obs, Rng&) {
  return policy_.act(obs, spec_.action_low, spec_.action_high);
}

Vector UniformNoiseExplorer::act(std::span<const double>, Rng& rng) {
  Vector a(spec_.act_dim);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform(spec_.action_low[i], spec_.action_high[i]);
  }
  return a;
}

}  // namespace brl
