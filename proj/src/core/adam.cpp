#include "brl/core/adam.hpp"

#include <cmath>

#include "brl/core/errors.hpp"

namespace brl {

void adam_step(ParamVector& params, AdamState& state) {
  const std::size_t n = params.size();
  if (params.grads.size() != n || state.m.size() != n || state.v.size() != n) {
    throw ShapeError("adam_step: optimizer state does not match parameters");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(params.grads[i])) {
      throw DivergenceError("adam_step: non-finite gradient at index " +
                            std::to_string(i));
    }
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = params.grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params.values[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
  if (!params.all_finite()) {
    throw DivergenceError("adam_step: parameters became non-finite");
  }
}

}  // namespace brl
