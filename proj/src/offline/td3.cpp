#include "brl/offline/td3.hpp"

#include <algorithm>

#include "brl/core/errors.hpp"
#include "brl/explore/sac.hpp"

namespace brl {

void Td3Config::validate() const {
  if (policy_delay < 1) throw ConfigError("td3: policy_delay must be at least 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("td3: tau must be in (0, 1]");
  if (target_noise < 0.0 || noise_clip < 0.0) throw ConfigError("td3: noise settings must be >= 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("td3: gamma must be in [0, 1]");
  if (batch_size < 1) throw ConfigError("td3: batch_size must be positive");
}

namespace {

void set_bounds(Td3Nets& n, const Vector& low, const Vector& high) {
  if (low.size() != high.size() || low.empty()) throw ConfigError("td3: bad action bounds");
  n.low = row_matrix(low);
  n.high = row_matrix(high);
  n.mid = 0.5 * (n.low + n.high);
  n.half = 0.5 * (n.high - n.low);
}

Matrix squash(const Matrix& unit, const RowVector& mid, const RowVector& half) {
  Matrix out = unit.array().rowwise() * half.array();
  return out.rowwise() + mid;
}

}  // namespace

Td3Nets::Td3Nets(std::size_t obs_dim, const Vector& lo, const Vector& hi, const Td3Config& config,
                 Rng& rng) {
  config.validate();
  set_bounds(*this, lo, hi);
  const std::size_t act_dim = lo.size();
  actor = make_mlp(obs_dim, config.hidden, act_dim, Activation::kTanh, rng);
  critic1 = make_mlp(obs_dim + act_dim, config.hidden, 1, Activation::kIdentity, rng);
  critic2 = make_mlp(obs_dim + act_dim, config.hidden, 1, Activation::kIdentity, rng);
  actor_target = actor;
  critic1_target = critic1;
  critic2_target = critic2;
  actor_opt = AdamState(actor.params().size(), config.actor_opt);
  critic1_opt = AdamState(critic1.params().size(), config.critic_opt);
  critic2_opt = AdamState(critic2.params().size(), config.critic_opt);
}

Matrix Td3Nets::act(const Matrix& obs) const { return squash(actor.forward(obs), mid, half); }

Matrix Td3Nets::target_act(const Matrix& obs) const {
  return squash(actor_target.forward(obs), mid, half);
}

Matrix td3_target(const Td3Nets& nets, const LabeledBatch& batch, const Td3Config& config,
                  Rng& rng) {
  Matrix next_action = nets.target_act(batch.next_obs);
  for (Eigen::Index i = 0; i < next_action.rows(); ++i) {
    for (Eigen::Index j = 0; j < next_action.cols(); ++j) {
      double eps = config.target_noise > 0.0 ? rng.normal(0.0, config.target_noise) : 0.0;
      eps = std::clamp(eps, -config.noise_clip, config.noise_clip);
      next_action(i, j) = std::clamp(next_action(i, j) + eps, nets.low(j), nets.high(j));
    }
  }
  const Matrix in = join_cols(batch.next_obs, next_action);
  const Matrix q = nets.critic1_target.forward(in).cwiseMin(nets.critic2_target.forward(in));
  return batch.reward + config.gamma * batch.not_done.cwiseProduct(q);
}

Td3Losses td3_update(Td3Nets& nets, const LabeledBatch& batch, const Td3Config& config, Rng& rng) {
  if (batch.size() == 0) throw UsageError("td3_update: empty batch");
  Td3Losses out;
  const Matrix target = td3_target(nets, batch, config, rng);
  {
    Tape tape;
    Var in = tape.constant(join_cols(batch.obs, batch.action));
    Var y = tape.constant(target);
    Var loss = add(mse(nets.critic1.forward(tape, in), y), mse(nets.critic2.forward(tape, in), y));
    out.critic = loss.item();
    require_finite(out.critic, "TD3 critic loss");
    tape.backward(loss);
    adam_step(nets.critic1.params(), nets.critic1_opt);
    adam_step(nets.critic2.params(), nets.critic2_opt);
    nets.critic1.params().zero_grads();
    nets.critic2.params().zero_grads();
  }
  nets.steps += 1;
  if (nets.steps % config.policy_delay != 0) return out;

  {
    Tape tape;
    Var o = tape.constant(batch.obs);
    Var a = offset_cols(scale_cols(nets.actor.forward(tape, o), nets.half), nets.mid);
    Var loss = neg(mean_all(nets.critic1.forward_frozen(tape, concat_cols(o, a))));
    out.actor = loss.item();
    require_finite(out.actor, "TD3 actor loss");
    tape.backward(loss);
    adam_step(nets.actor.params(), nets.actor_opt);
    nets.actor.params().zero_grads();
  }
  out.actor_updated = true;
  nets.actor_updates += 1;
  nets.actor_target.polyak_from(nets.actor, config.tau);
  nets.critic1_target.polyak_from(nets.critic1, config.tau);
  nets.critic2_target.polyak_from(nets.critic2, config.tau);
  return out;
}

}  // namespace brl
