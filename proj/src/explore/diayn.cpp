#include "brl/explore/diayn.hpp"

#include "brl/core/errors.hpp"

namespace brl {

SkillEnsemble::SkillEnsemble(const EnvSpec& spec, const DiaynConfig& config,
                             const SacConfig& sac, Rng& rng) {
  if (config.n_skills < 1) throw ConfigError("diayn: n_skills must be positive");
  for (std::size_t k = 0; k < config.n_skills; ++k) {
    skills.emplace_back(spec.obs_dim, spec.action_low, spec.action_high, sac, rng);
  }
  discriminator =
      make_mlp(spec.obs_dim, config.disc_hidden, config.n_skills, Activation::kIdentity, rng);
  disc_opt = AdamState(discriminator.params().size(), config.disc_opt);
}

Matrix SkillEnsemble::probabilities(const Matrix& x) const {
  return apply_activation(discriminator.forward(x), Activation::kSoftmax);
}

Matrix SkillEnsemble::log_probabilities(const Matrix& x) const {
  Tape tape;
  return log_softmax_rows(discriminator.forward_frozen(tape, tape.constant(x))).value();
}

namespace {

void check_skills(const SkillEnsemble& e, std::span<const std::size_t> skills, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(skills.size()) != rows) {
    throw ShapeError("diayn: need one skill label per row");
  }
  for (std::size_t s : skills) {
    if (s >= e.n_skills()) throw ConfigError("diayn: skill index out of range");
  }
}

}  // namespace

Matrix diayn_rewards(const SkillEnsemble& ensemble, std::span<const std::size_t> skills,
                     const Matrix& x) {
  check_skills(ensemble, skills, x.rows());
  const Matrix logp = ensemble.log_probabilities(x);
  Matrix r(x.rows(), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    r(i, 0) = logp(i, static_cast<Eigen::Index>(skills[static_cast<std::size_t>(i)]));
  }
  return r;
}

double diayn_reward(const SkillEnsemble& ensemble, std::size_t skill, std::span<const double> x) {
  const std::size_t skills[1] = {skill};
  return diayn_rewards(ensemble, skills, row_matrix(x))(0, 0);
}

double discriminator_loss(const SkillEnsemble& ensemble, const Matrix& x,
                          std::span<const std::size_t> skills) {
  return -diayn_rewards(ensemble, skills, x).mean();
}

double discriminator_update(SkillEnsemble& ensemble, const Matrix& x,
                            std::span<const std::size_t> skills) {
  check_skills(ensemble, skills, x.rows());
  if (x.rows() == 0) throw UsageError("diayn: empty batch");
  Tape tape;
  Var logp = log_softmax_rows(ensemble.discriminator.forward(tape, tape.constant(x)));
  Var loss = neg(mean_all(gather_cols(logp, skills)));
  const double value = loss.item();
  require_finite(value, "DIAYN discriminator loss");
  tape.backward(loss);
  adam_step(ensemble.discriminator.params(), ensemble.disc_opt);
  ensemble.discriminator.params().zero_grads();
  return value;
}

DiaynLosses diayn_update(SkillEnsemble& ensemble, const SkillBatch& batch, Rng& rng) {
  const LabeledBatch& d = batch.data;
  check_skills(ensemble, batch.skills, d.obs.rows());
  DiaynLosses out;
  out.discriminator = discriminator_update(ensemble, d.next_obs, batch.skills);
  out.skills.assign(ensemble.n_skills(), SacLosses{});
  out.updated.assign(ensemble.n_skills(), false);

  for (std::size_t k = 0; k < ensemble.n_skills(); ++k) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < batch.skills.size(); ++i) {
      if (batch.skills[i] == k) rows.push_back(static_cast<Eigen::Index>(i));
    }
    if (rows.empty()) continue;
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix obs(n, d.obs.cols()), act(n, d.action.cols()), next(n, d.next_obs.cols()),
        not_done(n, 1);
    for (Eigen::Index r = 0; r < n; ++r) {
      obs.row(r) = d.obs.row(rows[static_cast<std::size_t>(r)]);
      act.row(r) = d.action.row(rows[static_cast<std::size_t>(r)]);
      next.row(r) = d.next_obs.row(rows[static_cast<std::size_t>(r)]);
      not_done(r, 0) = d.not_done(rows[static_cast<std::size_t>(r)], 0);
    }
    const std::vector<std::size_t> labels(rows.size(), k);
    const Matrix reward = diayn_rewards(ensemble, labels, next);
    out.skills[k] = ensemble.skills[k].update(obs, act, reward, next, not_done, rng);
    out.updated[k] = true;
  }
  return out;
}

DiaynExplorer::DiaynExplorer(const EnvSpec& spec, const DiaynConfig& config, const SacConfig& sac,
                             LearnerSchedule schedule, Rng& rng)
    : LearnerExplorer(spec, schedule), ensemble_(spec, config, sac, rng) {}

void DiaynExplorer::begin_episode(Rng& rng) { skill_ = rng.index(ensemble_.n_skills()); }

Vector DiaynExplorer::policy_action(std::span<const double> obs, Rng& rng) {
  return ensemble_.skills[skill_].act(obs, rng);
}

void DiaynExplorer::record(const Transition&) { labels_.push_back(skill_); }

void DiaynExplorer::learn(std::span<const std::size_t> indices, Rng& rng) {
  SkillBatch batch{gather_batch(replay(), indices), {}};
  batch.skills.reserve(indices.size());
  for (std::size_t i : indices) batch.skills.push_back(labels_[i]);
  diayn_update(ensemble_, batch, rng);
}

}  // namespace brl
