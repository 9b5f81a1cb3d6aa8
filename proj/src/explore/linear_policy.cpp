#include "brl/explore/linear_policy.hpp"

#include <algorithm>

#include "brl/core/errors.hpp"

namespace brl {

LinearPolicy LinearPolicy::random(std::size_t obs_dim, std::size_t act_dim, double sigma, Rng& rng) {
  LinearPolicy p(obs_dim, act_dim);
  for (double& w : p.weights) w = rng.normal(0.0, sigma);
  for (double& b : p.bias) b = rng.normal(0.0, sigma);
  return p;
}

Vector LinearPolicy::act(std::span<const double> obs, std::span<const double> low,
                         std::span<const double> high) const {
  if (obs.size() != obs_dim) throw ShapeError("linear policy: observation size mismatch");
  if (low.size() != act_dim || high.size() != act_dim) {
    throw ShapeError("linear policy: action bounds size mismatch");
  }
  Vector a(act_dim);
  for (std::size_t i = 0; i < act_dim; ++i) {
    double s = bias[i];
    for (std::size_t j = 0; j < obs_dim; ++j) s += weights[i * obs_dim + j] * obs[j];
    a[i] = std::clamp(s, low[i], high[i]);
  }
  return a;
}

LinearPolicy LinearPolicy::perturbed(double sigma, Rng& rng) const {
  LinearPolicy p = *this;
  for (double& w : p.weights) w += rng.normal(0.0, sigma);
  for (double& b : p.bias) b += rng.normal(0.0, sigma);
  return p;
}

}  // namespace brl
