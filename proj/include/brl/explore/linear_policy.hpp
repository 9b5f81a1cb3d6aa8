#pragma once

#include <cstddef>
#include <span>

#include "brl/core/rng.hpp"
#include "brl/core/tensor.hpp"

namespace brl {

// Affine state -> action map, clipped to the action bounds.
struct LinearPolicy {
  std::size_t obs_dim = 0;
  std::size_t act_dim = 0;
  Vector weights;  // act_dim x obs_dim, row-major
  Vector bias;     // act_dim

  LinearPolicy() = default;
  LinearPolicy(std::size_t obs_dim, std::size_t act_dim)
      : obs_dim(obs_dim), act_dim(act_dim), weights(obs_dim * act_dim, 0.0), bias(act_dim, 0.0) {}

  // Entries i.i.d. N(0, sigma^2).
  static LinearPolicy random(std::size_t obs_dim, std::size_t act_dim, double sigma, Rng& rng);

  Vector act(std::span<const double> obs, std::span<const double> low,
             std::span<const double> high) const;
  // Copy with i.i.d. N(0, sigma^2) noise added to every weight and bias.
  LinearPolicy perturbed(double sigma, Rng& rng) const;
};

}  // namespace brl
