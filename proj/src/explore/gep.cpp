#include "brl/explore/gep.hpp"

#include <algorithm>
#include <limits>

#include "brl/core/errors.hpp"

namespace brl {

std::size_t gep_nearest(const GepMemory& memory, std::span<const double> goal) {
  if (memory.entries.empty()) throw UsageError("gep: memory is empty");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < memory.entries.size(); ++i) {
    const Vector& d = memory.entries[i].descriptor;
    if (d.size() != goal.size()) throw ShapeError("gep: goal and descriptor sizes differ");
    double d2 = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) d2 += (d[k] - goal[k]) * (d[k] - goal[k]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

LinearPolicy gep_select_and_perturb(const GepMemory& memory, std::span<const double> goal,
                                    Rng& rng, double sigma) {
  if (!memory.bootstrapped()) {
    throw PhaseError("gep: " + std::to_string(memory.entries.size()) + " of " +
                     std::to_string(memory.bootstrap_target) + " bootstrap policies collected");
  }
  return memory.entries[gep_nearest(memory, goal)].policy.perturbed(sigma, rng);
}

Vector gep_sample_goal(std::span<const double> low, std::span<const double> high, Rng& rng) {
  if (low.size() != high.size()) throw ShapeError("gep: bound sizes differ");
  Vector goal(low.size());
  for (std::size_t k = 0; k < goal.size(); ++k) goal[k] = rng.uniform(low[k], high[k]);
  return goal;
}

GepExplorer::GepExplorer(const EnvSpec& spec, GepConfig config)
    : spec_(spec), config_(config), policy_(spec.obs_dim, spec.act_dim),
      state_sum_(spec.obs_dim, 0.0),
      low_(spec.obs_dim, std::numeric_limits<double>::infinity()),
      high_(spec.obs_dim, -std::numeric_limits<double>::infinity()) {
  if (config_.bootstrap_episodes == 0) throw ConfigError("gep: bootstrap_episodes must be >= 1");
  memory_.bootstrap_target = config_.bootstrap_episodes;
}

void GepExplorer::close_episode() {
  if (!episode_open_ || state_count_ == 0) return;
  Vector descriptor(state_sum_);
  for (double& v : descriptor) v /= static_cast<double>(state_count_);
  memory_.entries.push_back({policy_, std::move(descriptor)});
  episode_open_ = false;
}

void GepExplorer::begin_episode(Rng& rng) {
  close_episode();
  if (!memory_.bootstrapped()) {
    policy_ = LinearPolicy::random(spec_.obs_dim, spec_.act_dim, config_.init_sigma, rng);
  } else {
    const Vector goal = gep_sample_goal(low_, high_, rng);
    policy_ = gep_select_and_perturb(memory_, goal, rng, config_.perturb_sigma);
  }
  std::fill(state_sum_.begin(), state_sum_.end(), 0.0);
  state_count_ = 0;
  episode_open_ = true;
}

Vector GepExplorer::act(std::span<const double> obs, Rng&) {
  return policy_.act(obs, spec_.action_low, spec_.action_high);
}

void GepExplorer::see_state(std::span<const double> x) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    state_sum_[k] += x[k];
    low_[k] = std::min(low_[k], x[k]);
    high_[k] = std::max(high_[k], x[k]);
  }
  state_count_ += 1;
}

void GepExplorer::observe(const Transition& t, Rng&) {
  if (state_count_ == 0) see_state(t.obs);
  see_state(t.next_obs);
}

}  // namespace brl
