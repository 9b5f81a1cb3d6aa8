#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brl/core/mlp.hpp"
#include "brl/core/rng.hpp"
#include "brl/core/tensor.hpp"

namespace brl {

// Tanh-squashed diagonal Gaussian policy. The network emits per-dimension
// mean and log-std (clamped to [-5, 2]); u = mean + std * eps is squashed into
// the action box as mid + half_span * tanh(u).
class StochasticPolicy {
 public:
  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  StochasticPolicy() = default;
  StochasticPolicy(std::size_t obs_dim, const Vector& low, const Vector& high,
                   const std::vector<std::size_t>& hidden, Rng& rng);

  struct TapeSample {
    Var action;    // B x act_dim
    Var log_prob;  // B x 1
  };
  struct Sample {
    Matrix action;
    Matrix log_prob;
  };

  // Reparameterized draw recorded on `tape`; `noise` is B x act_dim standard normal.
  TapeSample sample(Tape& tape, Var obs, const Matrix& noise);
  Sample sample(const Matrix& obs, const Matrix& noise) const;
  Sample sample(const Matrix& obs, Rng& rng) const;
  Matrix draw_noise(std::size_t rows, Rng& rng) const;

  // Squashed mean action (no sampling).
  Matrix deterministic(const Matrix& obs) const;
  // log density of given in-bounds actions, B x 1.
  Matrix log_prob(const Matrix& obs, const Matrix& action) const;

  std::size_t obs_dim() const { return net_.input_dim(); }
  std::size_t act_dim() const { return act_dim_; }
  const RowVector& mid() const { return mid_; }
  const RowVector& half_span() const { return half_; }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
  std::size_t act_dim_ = 0;
  RowVector mid_;
  RowVector half_;
};

}  // namespace brl
