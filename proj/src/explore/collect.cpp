#include "brl/explore/collect.hpp"

#include "brl/core/errors.hpp"
#include "brl/explore/baselines.hpp"

namespace brl {

double discounted_return(std::span<const double> rewards, std::span<const double> dones,
                         double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  if (rewards.size() != dones.size()) throw ShapeError("rewards and dones differ in length");
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    total += discount * (1.0 - dones[t]) * rewards[t];
    discount *= gamma;
  }
  return total;
}

std::unique_ptr<Explorer> make_explorer(std::string_view method, const EnvSpec& spec,
                                        const ExplorerSettings& s, Rng& rng) {
  if (method == "random") return std::make_unique<RandomPolicyExplorer>(spec, s.random_init_sigma);
  if (method == "noise") return std::make_unique<UniformNoiseExplorer>(spec);
  if (method == "gep") return std::make_unique<GepExplorer>(spec, s.gep);
  if (method == "rnd") return std::make_unique<RndExplorer>(spec, s.rnd, s.sac, s.schedule, rng);
  if (method == "diayn") {
    return std::make_unique<DiaynExplorer>(spec, s.diayn, s.sac, s.schedule, rng);
  }
  if (method == "sse") return std::make_unique<SseExplorer>(spec, s.sse, s.schedule, rng);
  throw ConfigError("unknown exploration method '" + std::string(method) + "'");
}

Dataset collect(Explorer& explorer, const Environment& env, std::size_t total_steps,
                std::uint64_t seed, std::string config_hash) {
  if (total_steps < 1) throw ConfigError("collect needs at least one step");
  const EnvSpec& spec = env.spec();
  DatasetMetadata meta;
  meta.env = spec.name;
  meta.method = explorer.method();
  meta.seed = seed;
  meta.steps = total_steps;
  meta.config_hash = std::move(config_hash);
  Dataset data(spec.obs_dim, spec.act_dim, meta);

  Rng rng(seed);
  auto episode = env.reset(rng.next_u64());
  EnvState state = episode.state;
  Vector obs = episode.observation;
  explorer.begin_episode(rng);
  for (std::size_t step = 0; step < total_steps; ++step) {
    const Vector action = env.clip_action(explorer.act(obs, rng));
    const StepResult r = env.step(state, action);
    Transition t{obs, action, r.observation, r.done, r.timeout};
    data.append(t);
    explorer.observe(t, rng);
    if (r.done) {
      episode = env.reset(rng.next_u64());
      state = episode.state;
      obs = episode.observation;
      if (step + 1 < total_steps) explorer.begin_episode(rng);
    } else {
      state = r.state;
      obs = r.observation;
    }
  }
  data.freeze();
  return data;
}

}  // namespace brl
