#include "brl/explore/rnd.hpp"

#include "brl/core/errors.hpp"

namespace brl {

RndModule::RndModule(std::size_t obs_dim, const RndConfig& config, Rng& rng)
    : teacher(make_mlp(obs_dim, config.hidden, config.embed_dim, Activation::kIdentity, rng)),
      student(make_mlp(obs_dim, config.hidden, config.embed_dim, Activation::kIdentity, rng)),
      student_opt(student.params().size(), config.opt) {
  if (config.embed_dim == 0) throw ConfigError("rnd: embed_dim must be positive");
}

Matrix rnd_rewards(const RndModule& module, const Matrix& x) {
  return (module.teacher.forward(x) - module.student.forward(x)).rowwise().norm();
}

double rnd_reward(const RndModule& module, std::span<const double> x) {
  return rnd_rewards(module, row_matrix(x))(0, 0);
}

double rnd_update(RndModule& module, const Matrix& x) {
  if (x.rows() == 0) throw UsageError("rnd_update: empty batch");
  Tape tape;
  Var in = tape.constant(x);
  Var target = tape.constant(module.teacher.forward(x));
  Var diff = sub(module.student.forward(tape, in), target);
  Var loss = mean_all(sum_rows(square(diff)));
  const double value = loss.item();
  require_finite(value, "RND loss");
  tape.backward(loss);
  adam_step(module.student.params(), module.student_opt);
  module.student.params().zero_grads();
  return value;
}

RndExplorer::RndExplorer(const EnvSpec& spec, const RndConfig& rnd, const SacConfig& sac,
                         LearnerSchedule schedule, Rng& rng)
    : LearnerExplorer(spec, schedule), module_(spec.obs_dim, rnd, rng),
      agent_(spec.obs_dim, spec.action_low, spec.action_high, sac, rng) {}

Vector RndExplorer::policy_action(std::span<const double> obs, Rng& rng) {
  return agent_.act(obs, rng);
}

void RndExplorer::learn(std::span<const std::size_t> indices, Rng& rng) {
  const LabeledBatch b = gather_batch(replay(), indices);
  const Matrix reward = rnd_rewards(module_, b.next_obs);
  agent_.update(b.obs, b.action, reward, b.next_obs, b.not_done, rng);
  rnd_update(module_, b.next_obs);
}

}  // namespace brl
