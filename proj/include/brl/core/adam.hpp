#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "brl/core/params.hpp"

namespace brl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::uint64_t step_count = 0;
  std::vector<double> m;
  std::vector<double> v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, const AdamConfig& config)
      : m(n, 0.0), v(n, 0.0), lr(config.lr), beta1(config.beta1),
        beta2(config.beta2), eps(config.eps) {}
};

// Bias-corrected Adam update of params.values from params.grads. Gradients are
// left untouched; callers zero them. Throws DivergenceError (and leaves the
// parameters unchanged) if any gradient is non-finite.
void adam_step(ParamVector& params, AdamState& state);

}  // namespace brl
