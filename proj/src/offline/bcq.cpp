#include "brl/offline/bcq.hpp"

#include <algorithm>
#include <cmath>

#include "brl/core/errors.hpp"
#include "brl/explore/sac.hpp"

namespace brl {

void BcqConfig::validate() const {
  if (n_candidates < 1) throw ConfigError("bcq: n_candidates must be at least 1");
  if (phi < 0.0) throw ConfigError("bcq: phi must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("bcq: lambda must be in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("bcq: tau must be in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("bcq: gamma must be in [0, 1]");
  if (batch_size < 1) throw ConfigError("bcq: batch_size must be positive");
}

ActionGenerator::ActionGenerator(std::size_t obs_dim, const Vector& low, const Vector& high,
                                 const BcqConfig& config, Rng& rng) {
  const std::size_t act_dim = low.size();
  latent_dim = config.latent_dim == 0 ? 2 * act_dim : config.latent_dim;
  encoder = make_mlp(obs_dim + act_dim, config.vae_hidden, 2 * latent_dim, Activation::kIdentity, rng);
  decoder = make_mlp(obs_dim + latent_dim, config.vae_hidden, act_dim, Activation::kTanh, rng);
  const RowVector lo = row_matrix(low), hi = row_matrix(high);
  mid = 0.5 * (lo + hi);
  half = 0.5 * (hi - lo);
  opt = AdamState(encoder.params().size() + decoder.params().size(), config.vae_opt);
}

Matrix ActionGenerator::decode(const Matrix& obs, const Matrix& z) const {
  Matrix out = decoder.forward(join_cols(obs, z)).array().rowwise() * half.array();
  return out.rowwise() + mid;
}

Matrix ActionGenerator::sample(const Matrix& obs, Rng& rng) const {
  Matrix z(obs.rows(), static_cast<Eigen::Index>(latent_dim));
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z.data()[i] = std::clamp(rng.normal(), -kLatentClip, kLatentClip);
  }
  return decode(obs, z);
}

double vae_kl(const Matrix& mean, const Matrix& log_std) {
  const Matrix var = (2.0 * log_std).unaryExpr([](double v) { return std::exp(v); });
  return (-0.5 * (1.0 + 2.0 * log_std.array() - mean.array().square() - var.array())).mean();
}

namespace {

// Encoder and decoder share one Adam state over their concatenated parameters.
void step_generator(ActionGenerator& gen) {
  ParamVector joint(gen.encoder.params().size() + gen.decoder.params().size());
  auto& e = gen.encoder.params();
  auto& d = gen.decoder.params();
  std::copy(e.values.begin(), e.values.end(), joint.values.begin());
  std::copy(d.values.begin(), d.values.end(), joint.values.begin() + static_cast<long>(e.size()));
  std::copy(e.grads.begin(), e.grads.end(), joint.grads.begin());
  std::copy(d.grads.begin(), d.grads.end(), joint.grads.begin() + static_cast<long>(e.size()));
  adam_step(joint, gen.opt);
  std::copy(joint.values.begin(), joint.values.begin() + static_cast<long>(e.size()), e.values.begin());
  std::copy(joint.values.begin() + static_cast<long>(e.size()), joint.values.end(), d.values.begin());
  e.zero_grads();
  d.zero_grads();
}

Var decode_on(Tape& tape, ActionGenerator& gen, Var obs, Var z) {
  return offset_cols(scale_cols(gen.decoder.forward(tape, concat_cols(obs, z)), gen.half), gen.mid);
}

}  // namespace

double bcq_generator_update(ActionGenerator& gen, const Matrix& obs, const Matrix& action,
                            Rng& rng) {
  if (obs.rows() == 0) throw UsageError("bcq_generator_update: empty batch");
  const auto L = static_cast<Eigen::Index>(gen.latent_dim);
  Tape tape;
  Var o = tape.constant(obs);
  Var stats = gen.encoder.forward(tape, concat_cols(o, tape.constant(action)));
  Var mean = slice_cols(stats, 0, L);
  Var log_std = clamp(slice_cols(stats, L, L), ActionGenerator::kLogStdMin,
                      ActionGenerator::kLogStdMax);
  Var std = exp(log_std);
  Matrix eps(obs.rows(), L);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = rng.normal();
  Var z = add(mean, mul(std, tape.constant(eps)));
  Var recon = mse(decode_on(tape, gen, o, z), tape.constant(action));
  // -0.5 * (1 + log var - mean^2 - var), averaged over elements
  Var kl = scale(mean_all(sub(sub(add_scalar(scale(log_std, 2.0), 1.0), square(mean)),
                              square(std))),
                 -0.5);
  Var loss = add(recon, scale(kl, 0.5));
  const double value = loss.item();
  require_finite(value, "BCQ generator loss");
  tape.backward(loss);
  step_generator(gen);
  return value;
}

double bcq_reconstruction_error(const ActionGenerator& gen, const Matrix& obs,
                                const Matrix& action) {
  const Matrix stats = gen.encoder.forward(join_cols(obs, action));
  const Matrix mean = stats.leftCols(static_cast<Eigen::Index>(gen.latent_dim));
  return (gen.decode(obs, mean) - action).array().square().mean();
}

BcqNets::BcqNets(std::size_t obs_dim, const Vector& lo, const Vector& hi, const BcqConfig& config,
                 Rng& rng) {
  config.validate();
  if (lo.size() != hi.size() || lo.empty()) throw ConfigError("bcq: bad action bounds");
  const std::size_t act_dim = lo.size();
  low = row_matrix(lo);
  high = row_matrix(hi);
  max_shift = config.phi * (high - low);
  generator = ActionGenerator(obs_dim, lo, hi, config, rng);
  perturb = make_mlp(obs_dim + act_dim, config.hidden, act_dim, Activation::kTanh, rng);
  critic1 = make_mlp(obs_dim + act_dim, config.hidden, 1, Activation::kIdentity, rng);
  critic2 = make_mlp(obs_dim + act_dim, config.hidden, 1, Activation::kIdentity, rng);
  perturb_target = perturb;
  critic1_target = critic1;
  critic2_target = critic2;
  perturb_opt = AdamState(perturb.params().size(), config.actor_opt);
  critic1_opt = AdamState(critic1.params().size(), config.critic_opt);
  critic2_opt = AdamState(critic2.params().size(), config.critic_opt);
}

Matrix BcqNets::perturbed(const Mlp& net, const Matrix& obs, const Matrix& action) const {
  Matrix shift = net.forward(join_cols(obs, action)).array().rowwise() * max_shift.array();
  Matrix out = action + shift;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = out.col(j).cwiseMax(low(j)).cwiseMin(high(j));
  }
  return out;
}

namespace {

Matrix repeat_rows(const Matrix& x, std::size_t n) {
  Matrix out(x.rows() * static_cast<Eigen::Index>(n), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < n; ++k) out.row(i * static_cast<Eigen::Index>(n) + static_cast<Eigen::Index>(k)) = x.row(i);
  }
  return out;
}

}  // namespace

Vector bcq_select_action(const BcqNets& nets, std::span<const double> x, const BcqConfig& config,
                         Rng& rng) {
  const Matrix obs = repeat_rows(row_matrix(x), config.n_candidates);
  const Matrix candidates = nets.perturbed(nets.perturb, obs, nets.generator.sample(obs, rng));
  const Matrix q = nets.critic1.forward(join_cols(obs, candidates));
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.rows(); ++i) {
    if (q(i, 0) > q(best, 0)) best = i;
  }
  return to_vector(candidates.row(best));
}

Matrix bcq_soft_clipped(const Matrix& q1, const Matrix& q2, double lambda) {
  return lambda * q1.cwiseMin(q2) + (1.0 - lambda) * q1.cwiseMax(q2);
}

Matrix bcq_target(const BcqNets& nets, const LabeledBatch& batch, const BcqConfig& config,
                  Rng& rng) {
  const std::size_t n = config.n_candidates;
  const Matrix next = repeat_rows(batch.next_obs, n);
  const Matrix cand = nets.perturbed(nets.perturb_target, next, nets.generator.sample(next, rng));
  const Matrix in = join_cols(next, cand);
  const Matrix q = bcq_soft_clipped(nets.critic1_target.forward(in),
                                    nets.critic2_target.forward(in), config.lambda);
  Matrix best(batch.next_obs.rows(), 1);
  for (Eigen::Index i = 0; i < best.rows(); ++i) {
    best(i, 0) = q.block(i * static_cast<Eigen::Index>(n), 0, static_cast<Eigen::Index>(n), 1).maxCoeff();
  }
  return batch.reward + config.gamma * batch.not_done.cwiseProduct(best);
}

BcqLosses bcq_update(BcqNets& nets, const LabeledBatch& batch, const BcqConfig& config, Rng& rng) {
  if (batch.size() == 0) throw UsageError("bcq_update: empty batch");
  BcqLosses out;
  out.generator = bcq_generator_update(nets.generator, batch.obs, batch.action, rng);

  const Matrix target = bcq_target(nets, batch, config, rng);
  {
    Tape tape;
    Var in = tape.constant(join_cols(batch.obs, batch.action));
    Var y = tape.constant(target);
    Var loss = add(mse(nets.critic1.forward(tape, in), y), mse(nets.critic2.forward(tape, in), y));
    out.critic = loss.item();
    require_finite(out.critic, "BCQ critic loss");
    tape.backward(loss);
    adam_step(nets.critic1.params(), nets.critic1_opt);
    adam_step(nets.critic2.params(), nets.critic2_opt);
    nets.critic1.params().zero_grads();
    nets.critic2.params().zero_grads();
  }
  {
    const Matrix sampled = nets.generator.sample(batch.obs, rng);
    Tape tape;
    Var o = tape.constant(batch.obs);
    Var a = tape.constant(sampled);
    Var shifted = add(a, scale_cols(nets.perturb.forward(tape, concat_cols(o, a)), nets.max_shift));
    Matrix lo = nets.low.replicate(batch.obs.rows(), 1), hi = nets.high.replicate(batch.obs.rows(), 1);
    Var act = minimum(maximum(shifted, tape.constant(lo)), tape.constant(hi));
    Var loss = neg(mean_all(nets.critic1.forward_frozen(tape, concat_cols(o, act))));
    out.actor = loss.item();
    require_finite(out.actor, "BCQ perturbation loss");
    tape.backward(loss);
    adam_step(nets.perturb.params(), nets.perturb_opt);
    nets.perturb.params().zero_grads();
  }
  nets.steps += 1;
  nets.perturb_target.polyak_from(nets.perturb, config.tau);
  nets.critic1_target.polyak_from(nets.critic1, config.tau);
  nets.critic2_target.polyak_from(nets.critic2, config.tau);
  return out;
}

}  // namespace brl
