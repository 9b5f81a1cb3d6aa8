#include "brl/explore/sac.hpp"

#include <cmath>
#include <string>

#include "brl/core/errors.hpp"

namespace brl {

Matrix join_cols(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("join_cols: row count mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw DivergenceError(std::string(what) + " is not finite");
}

Matrix soft_q_target(const Matrix& reward, const Matrix& not_done, const Matrix& q1_next,
                     const Matrix& q2_next, const Matrix& log_prob_next, double gamma,
                     double alpha) {
  const Matrix soft = q1_next.cwiseMin(q2_next) - alpha * log_prob_next;
  return reward + gamma * not_done.cwiseProduct(soft);
}

SacAgent::SacAgent(std::size_t obs_dim, const Vector& low, const Vector& high,
                   const SacConfig& config, Rng& rng)
    : config_(config), policy_(obs_dim, low, high, config.hidden, rng) {
  const std::size_t act_dim = low.size();
  q1_ = make_mlp(obs_dim + act_dim, config.hidden, 1, Activation::kIdentity, rng);
  q2_ = make_mlp(obs_dim + act_dim, config.hidden, 1, Activation::kIdentity, rng);
  q1_target_ = q1_;
  q2_target_ = q2_;
  policy_opt_ = AdamState(policy_.net().params().size(), config.actor_opt);
  q1_opt_ = AdamState(q1_.params().size(), config.critic_opt);
  q2_opt_ = AdamState(q2_.params().size(), config.critic_opt);
}

Matrix SacAgent::critic_targets(const Matrix& reward, const Matrix& next_obs,
                                const Matrix& not_done, Rng& rng) const {
  const auto next = policy_.sample(next_obs, rng);
  const Matrix in = join_cols(next_obs, next.action);
  return soft_q_target(reward, not_done, q1_target_.forward(in), q2_target_.forward(in),
                       next.log_prob, config_.gamma, config_.alpha);
}

SacLosses SacAgent::update(const Matrix& obs, const Matrix& action, const Matrix& reward,
                           const Matrix& next_obs, const Matrix& not_done, Rng& rng) {
  SacLosses losses;
  const Matrix target = critic_targets(reward, next_obs, not_done, rng);
  {
    Tape tape;
    Var in = tape.constant(join_cols(obs, action));
    Var y = tape.constant(target);
    Var l1 = mse(q1_.forward(tape, in), y);
    Var l2 = mse(q2_.forward(tape, in), y);
    Var total = add(l1, l2);
    losses.critic = total.item();
    require_finite(losses.critic, "SAC critic loss");
    tape.backward(total);
    adam_step(q1_.params(), q1_opt_);
    adam_step(q2_.params(), q2_opt_);
    q1_.params().zero_grads();
    q2_.params().zero_grads();
  }
  {
    Tape tape;
    Var o = tape.constant(obs);
    auto s = policy_.sample(tape, o, policy_.draw_noise(static_cast<std::size_t>(obs.rows()), rng));
    Var in = concat_cols(o, s.action);
    Var q = minimum(q1_.forward_frozen(tape, in), q2_.forward_frozen(tape, in));
    Var loss = mean_all(sub(scale(s.log_prob, config_.alpha), q));
    losses.actor = loss.item();
    require_finite(losses.actor, "SAC actor loss");
    tape.backward(loss);
    adam_step(policy_.net().params(), policy_opt_);
    policy_.net().params().zero_grads();
  }
  q1_target_.polyak_from(q1_, config_.tau);
  q2_target_.polyak_from(q2_, config_.tau);
  return losses;
}

Vector SacAgent::act(std::span<const double> obs, Rng& rng) const {
  return to_vector(policy_.sample(row_matrix(obs), rng).action);
}

}  // namespace brl
