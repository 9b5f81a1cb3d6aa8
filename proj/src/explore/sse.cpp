#include "brl/explore/sse.hpp"

#include <cmath>

#include "brl/core/errors.hpp"
#include "brl/explore/sac.hpp"

namespace brl {

SseModels::SseModels(const EnvSpec& spec, const SseConfig& config, Rng& rng)
    : horizon(config.horizon), gamma(config.gamma) {
  if (config.horizon < 1) throw ConfigError("sse: horizon must be at least 1");
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) throw ConfigError("sse: gamma must be in [0, 1)");
  const std::size_t in = spec.obs_dim + spec.act_dim;
  f1 = make_mlp(in, config.model_hidden, spec.obs_dim, Activation::kIdentity, rng);
  f2 = make_mlp(in, config.model_hidden, spec.obs_dim, Activation::kIdentity, rng);
  f_done = make_mlp(spec.obs_dim, config.model_hidden, 1, Activation::kSigmoid, rng);
  policy = StochasticPolicy(spec.obs_dim, spec.action_low, spec.action_high, config.policy_hidden, rng);
  f1_opt = AdamState(f1.params().size(), config.model_opt);
  f2_opt = AdamState(f2.params().size(), config.model_opt);
  done_opt = AdamState(f_done.params().size(), config.done_opt);
  policy_opt = AdamState(policy.net().params().size(), config.policy_opt);
}

Matrix sse_rewards(const SseModels& models, const Matrix& x, const Matrix& a) {
  const Matrix in = join_cols(x, a);
  return (models.f1.forward(in) - models.f2.forward(in)).rowwise().norm();
}

double sse_reward(const SseModels& models, std::span<const double> x, std::span<const double> a) {
  return sse_rewards(models, row_matrix(x), row_matrix(a))(0, 0);
}

double intrinsic_pred_error_reward(const Mlp& model, std::span<const double> x,
                                   std::span<const double> a, std::span<const double> x_next) {
  if (x_next.size() != model.output_dim()) throw ShapeError("prediction error: next-state size");
  const Matrix pred = model.forward(join_cols(row_matrix(x), row_matrix(a)));
  return (row_matrix(x_next) - pred).norm();
}

std::vector<Matrix> sse_rollout_noise(const SseModels& models, std::size_t rows, Rng& rng) {
  std::vector<Matrix> noise;
  noise.reserve(models.horizon);
  for (std::size_t t = 0; t < models.horizon; ++t) noise.push_back(models.policy.draw_noise(rows, rng));
  return noise;
}

Var sse_rollout_value(Tape& tape, SseModels& models, const Matrix& start,
                      std::span<const Matrix> noise) {
  if (noise.size() != models.horizon) throw ShapeError("sse rollout: need one noise draw per step");
  if (start.rows() == 0) throw UsageError("sse rollout: empty start batch");
  Var x = tape.constant(start);
  Var total, survival;
  double discount = 1.0;
  for (std::size_t t = 0; t < models.horizon; ++t) {
    auto s = models.policy.sample(tape, x, noise[t]);
    Var xa = concat_cols(x, s.action);
    Var p1 = models.f1.forward_frozen(tape, xa);
    Var p2 = models.f2.forward_frozen(tape, xa);
    Var alive = add_scalar(neg(models.f_done.forward_frozen(tape, x)), 1.0);
    survival = t == 0 ? alive : mul(survival, alive);
    Var term = scale(mul(survival, sub(row_norm(sub(p1, p2)), s.log_prob)), discount);
    total = t == 0 ? term : add(total, term);
    x = scale(add(p1, p2), 0.5);
    discount *= models.gamma;
  }
  Var value = mean_all(total);
  require_finite(value.item(), "SSE rollout value");
  return value;
}

namespace {

double regress(Mlp& model, AdamState& opt, const Matrix& in, const Matrix& target, const char* what) {
  Tape tape;
  Var loss = mse(model.forward(tape, tape.constant(in)), tape.constant(target));
  const double value = loss.item();
  require_finite(value, what);
  tape.backward(loss);
  adam_step(model.params(), opt);
  model.params().zero_grads();
  return value;
}

}  // namespace

SseLosses sse_update(SseModels& models, const LabeledBatch& batch, Rng& rng) {
  const Eigen::Index n = batch.obs.rows();
  if (n < 2) throw UsageError("sse_update: need at least two transitions");
  SseLosses out;
  const Matrix in = join_cols(batch.obs, batch.action);
  const Eigen::Index half = n / 2;
  out.f1 = regress(models.f1, models.f1_opt, in.topRows(half), batch.next_obs.topRows(half),
                   "SSE f1 loss");
  out.f2 = regress(models.f2, models.f2_opt, in.bottomRows(n - half),
                   batch.next_obs.bottomRows(n - half), "SSE f2 loss");
  {
    // Terminal labels are failures only; time limits are not predicted.
    Tape tape;
    Var p = clamp(models.f_done.forward(tape, tape.constant(batch.next_obs)), 1e-12, 1.0 - 1e-12);
    Var y = tape.constant(Matrix::Ones(n, 1) - batch.not_done);
    Var not_y = tape.constant(batch.not_done);
    Var ll = add(mul(y, log(p)), mul(not_y, log(add_scalar(neg(p), 1.0))));
    Var loss = neg(mean_all(ll));
    out.done = loss.item();
    require_finite(out.done, "SSE termination loss");
    tape.backward(loss);
    adam_step(models.f_done.params(), models.done_opt);
    models.f_done.params().zero_grads();
  }
  {
    Tape tape;
    const auto noise = sse_rollout_noise(models, static_cast<std::size_t>(n), rng);
    Var value = sse_rollout_value(tape, models, batch.obs, noise);
    out.value = value.item();
    tape.backward(neg(value));
    adam_step(models.policy.net().params(), models.policy_opt);
    models.policy.net().params().zero_grads();
  }
  return out;
}

SseExplorer::SseExplorer(const EnvSpec& spec, const SseConfig& config, LearnerSchedule schedule,
                         Rng& rng)
    : LearnerExplorer(spec, schedule), models_(spec, config, rng) {}

Vector SseExplorer::policy_action(std::span<const double> obs, Rng& rng) {
  return to_vector(models_.policy.sample(row_matrix(obs), rng).action);
}

void SseExplorer::learn(std::span<const std::size_t> indices, Rng& rng) {
  sse_update(models_, gather_batch(replay(), indices), rng);
}

}  // namespace brl
