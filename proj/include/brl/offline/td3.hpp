#pragma once

#include <cstddef>
#include <vector>

#include "brl/core/adam.hpp"
#include "brl/core/mlp.hpp"
#include "brl/data/dataset.hpp"

namespace brl {

struct Td3Config {
  double gamma = 0.99;
  double tau = 0.005;
  double target_noise = 0.2;
  double noise_clip = 0.5;
  std::size_t policy_delay = 2;
  std::size_t batch_size = 256;
  AdamConfig actor_opt{3e-4};
  AdamConfig critic_opt{3e-4};
  std::vector<std::size_t> hidden{64, 64};

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Deterministic actor (tanh squashed into the action box), twin critics and
// their targets.
struct Td3Nets {
  Mlp actor, critic1, critic2;
  Mlp actor_target, critic1_target, critic2_target;
  AdamState actor_opt, critic1_opt, critic2_opt;
  RowVector low, high, mid, half;
  std::size_t steps = 0;
  std::size_t actor_updates = 0;

  Td3Nets(std::size_t obs_dim, const Vector& low, const Vector& high, const Td3Config& config,
          Rng& rng);

  Matrix act(const Matrix& obs) const;
  Matrix target_act(const Matrix& obs) const;
};

// r + gamma * not_done * min(Q1'(x', a'), Q2'(x', a')), with
// a' = clip(pi'(x') + clip(eps, -c, c), bounds), eps ~ N(0, sigma^2).
Matrix td3_target(const Td3Nets& nets, const LabeledBatch& batch, const Td3Config& config, Rng& rng);

struct Td3Losses {
  double critic = 0.0;
  double actor = 0.0;
  bool actor_updated = false;
};

// One critic step; every policy_delay-th call also one actor step followed by
// Polyak averaging of all targets.
Td3Losses td3_update(Td3Nets& nets, const LabeledBatch& batch, const Td3Config& config, Rng& rng);

}  // namespace brl
