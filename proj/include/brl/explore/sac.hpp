#pragma once

#include <cstddef>
#include <vector>

#include "brl/core/adam.hpp"
#include "brl/core/mlp.hpp"
#include "brl/explore/stochastic_policy.hpp"

namespace brl {

struct SacConfig {
  double gamma = 0.99;
  double tau = 0.005;
  // Fixed entropy weight.
  double alpha = 0.2;
  AdamConfig actor_opt{3e-4};
  AdamConfig critic_opt{3e-4};
  std::vector<std::size_t> hidden{64, 64};
};

struct SacLosses {
  double critic = 0.0;
  double actor = 0.0;
};

// r + gamma * not_done * (min(q1', q2') - alpha * log pi(a'|x')), all B x 1.
Matrix soft_q_target(const Matrix& reward, const Matrix& not_done, const Matrix& q1_next,
                     const Matrix& q2_next, const Matrix& log_prob_next, double gamma,
                     double alpha);

// Max-entropy actor-critic with twin critics and Polyak-averaged targets.
// Shared learner for the RND and DIAYN explorers.
class SacAgent {
 public:
  SacAgent(std::size_t obs_dim, const Vector& low, const Vector& high, const SacConfig& config,
           Rng& rng);

  // Targets for a batch of (reward, next_obs, not_done); next actions are drawn
  // from the current policy with `rng`.
  Matrix critic_targets(const Matrix& reward, const Matrix& next_obs, const Matrix& not_done,
                        Rng& rng) const;

  // One critic step on both critics, one policy step, then target averaging.
  // Rewards are supplied by the caller (intrinsic rewards are recomputed at
  // update time). Throws DivergenceError on a non-finite loss.
  SacLosses update(const Matrix& obs, const Matrix& action, const Matrix& reward,
                   const Matrix& next_obs, const Matrix& not_done, Rng& rng);

  Vector act(std::span<const double> obs, Rng& rng) const;

  const SacConfig& config() const { return config_; }
  StochasticPolicy& policy() { return policy_; }
  const StochasticPolicy& policy() const { return policy_; }
  Mlp& critic(int i) { return i == 0 ? q1_ : q2_; }
  const Mlp& critic(int i) const { return i == 0 ? q1_ : q2_; }
  Mlp& target_critic(int i) { return i == 0 ? q1_target_ : q2_target_; }
  const Mlp& target_critic(int i) const { return i == 0 ? q1_target_ : q2_target_; }

 private:
  SacConfig config_;
  StochasticPolicy policy_;
  Mlp q1_, q2_, q1_target_, q2_target_;
  AdamState policy_opt_, q1_opt_, q2_opt_;
};

inline SacLosses sac_update(SacAgent& agent, const Matrix& obs, const Matrix& action,
                            const Matrix& reward, const Matrix& next_obs,
                            const Matrix& not_done, Rng& rng) {
  return agent.update(obs, action, reward, next_obs, not_done, rng);
}

// Concatenates observation and action columns.
Matrix join_cols(const Matrix& a, const Matrix& b);

// Throws DivergenceError naming `what` if `value` is not finite.
void require_finite(double value, const char* what);

}  // namespace brl
