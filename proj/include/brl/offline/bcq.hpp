#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brl/core/adam.hpp"
#include "brl/core/mlp.hpp"
#include "brl/data/dataset.hpp"

namespace brl {

struct BcqConfig {
  double gamma = 0.99;
  double tau = 0.005;
  std::size_t n_candidates = 10;
  // Perturbation range as a fraction of each action dimension's span.
  double phi = 0.05;
  double lambda = 0.75;
  // 0 means 2 * act_dim.
  std::size_t latent_dim = 0;
  std::size_t batch_size = 100;
  AdamConfig actor_opt{1e-3};
  AdamConfig critic_opt{1e-3};
  AdamConfig vae_opt{1e-3};
  std::vector<std::size_t> hidden{64, 64};
  std::vector<std::size_t> vae_hidden{64, 64};

  void validate() const;
};

// State-conditional VAE over dataset actions.
struct ActionGenerator {
  static constexpr double kLatentClip = 2.5;
  static constexpr double kLogStdMin = -4.0;
  static constexpr double kLogStdMax = 15.0;

  Mlp encoder;  // (obs, action) -> (mean, log_std), identity output
  Mlp decoder;  // (obs, z) -> action in [-1, 1], scaled to bounds
  std::size_t latent_dim = 0;
  RowVector mid, half;
  AdamState opt;

  ActionGenerator() = default;
  ActionGenerator(std::size_t obs_dim, const Vector& low, const Vector& high,
                  const BcqConfig& config, Rng& rng);

  Matrix decode(const Matrix& obs, const Matrix& z) const;
  // Latent drawn from N(0, I) and clipped to +-kLatentClip.
  Matrix sample(const Matrix& obs, Rng& rng) const;
};

// Mean over elements of -0.5 (1 + 2 log_std - mean^2 - exp(2 log_std)).
double vae_kl(const Matrix& mean, const Matrix& log_std);

// One step on reconstruction MSE + 0.5 KL. Returns the loss before the step.
double bcq_generator_update(ActionGenerator& gen, const Matrix& obs, const Matrix& action,
                            Rng& rng);
// Reconstruction MSE of the decoder at the encoder mean (no sampling).
double bcq_reconstruction_error(const ActionGenerator& gen, const Matrix& obs,
                                const Matrix& action);

struct BcqNets {
  ActionGenerator generator;
  Mlp perturb;  // (obs, action) -> tanh in [-1, 1], scaled by phi * span
  Mlp critic1, critic2;
  Mlp perturb_target, critic1_target, critic2_target;
  AdamState perturb_opt, critic1_opt, critic2_opt;
  RowVector low, high, max_shift;
  std::size_t steps = 0;

  BcqNets(std::size_t obs_dim, const Vector& low, const Vector& high, const BcqConfig& config,
          Rng& rng);

  // clip(action + max_shift * xi(obs, action), bounds)
  Matrix perturbed(const Mlp& net, const Matrix& obs, const Matrix& action) const;
};

// Draws n_candidates generator samples at x, perturbs and clips them, and
// returns the one with the largest Q1 (first on ties).
Vector bcq_select_action(const BcqNets& nets, std::span<const double> x, const BcqConfig& config,
                         Rng& rng);

// lambda * min(Q1', Q2') + (1 - lambda) * max(Q1', Q2'), elementwise.
Matrix bcq_soft_clipped(const Matrix& q1, const Matrix& q2, double lambda);

// r + gamma * not_done * max over candidates of the soft-clipped target value,
// candidates being perturbed (target perturbation net) generator samples at x'.
Matrix bcq_target(const BcqNets& nets, const LabeledBatch& batch, const BcqConfig& config,
                  Rng& rng);

struct BcqLosses {
  double generator = 0.0;
  double critic = 0.0;
  double actor = 0.0;
};

BcqLosses bcq_update(BcqNets& nets, const LabeledBatch& batch, const BcqConfig& config, Rng& rng);

}  // namespace brl
