#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brl/core/adam.hpp"
#include "brl/core/mlp.hpp"
#include "brl/data/dataset.hpp"
#include "brl/explore/learner_explorer.hpp"
#include "brl/explore/stochastic_policy.hpp"

namespace brl {

struct SseConfig {
  std::size_t horizon = 5;
  double gamma = 0.99;
  std::vector<std::size_t> model_hidden{64, 64};
  std::vector<std::size_t> policy_hidden{64, 64};
  AdamConfig model_opt{1e-3};
  AdamConfig done_opt{1e-3};
  AdamConfig policy_opt{3e-4};
};

// Two forward models (obs, action) -> next obs, a termination model over
// observations, and the exploring policy.
struct SseModels {
  Mlp f1;
  Mlp f2;
  Mlp f_done;  // sigmoid output
  StochasticPolicy policy;
  std::size_t horizon = 5;
  double gamma = 0.99;
  AdamState f1_opt, f2_opt, done_opt, policy_opt;

  SseModels(const EnvSpec& spec, const SseConfig& config, Rng& rng);
};

// ||f1(x, a) - f2(x, a)||
double sse_reward(const SseModels& models, std::span<const double> x, std::span<const double> a);
Matrix sse_rewards(const SseModels& models, const Matrix& x, const Matrix& a);  // B x 1

// ||x_next - model(x, a)||. Plain prediction-error novelty.
double intrinsic_pred_error_reward(const Mlp& model, std::span<const double> x,
                                   std::span<const double> a, std::span<const double> x_next);

// Imagined H-step rollout from `start` through the frozen models, recorded on
// `tape` with the policy parameters tracked. noise[t] is the B x act_dim
// standard normal draw for step t. Returns the batch mean of
//   sum_t gamma^t s_t (||f1 - f2|| - log pi(a_t)),  s_t = prod_{k<=t} (1 - f_done(x_k)).
Var sse_rollout_value(Tape& tape, SseModels& models, const Matrix& start,
                      std::span<const Matrix> noise);
std::vector<Matrix> sse_rollout_noise(const SseModels& models, std::size_t rows, Rng& rng);

struct SseLosses {
  double f1 = 0.0;
  double f2 = 0.0;
  double done = 0.0;
  double value = 0.0;  // rollout objective before the policy step
};

// f1 on the first half of the rows, f2 on the second half, f_done BCE on
// failure labels, then one ascent step on the rollout value from batch states.
SseLosses sse_update(SseModels& models, const LabeledBatch& batch, Rng& rng);

class SseExplorer final : public LearnerExplorer {
 public:
  SseExplorer(const EnvSpec& spec, const SseConfig& config, LearnerSchedule schedule, Rng& rng);

  std::string method() const override { return "sse"; }
  const SseModels& models() const { return models_; }

 protected:
  Vector policy_action(std::span<const double> obs, Rng& rng) override;
  void learn(std::span<const std::size_t> indices, Rng& rng) override;

 private:
  SseModels models_;
};

}  // namespace brl
