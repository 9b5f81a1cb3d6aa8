#include "brl/explore/stochastic_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brl/core/errors.hpp"

namespace brl {

namespace {

constexpr double kSquashEps = 1e-6;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

StochasticPolicy::StochasticPolicy(std::size_t obs_dim, const Vector& low, const Vector& high,
                                   const std::vector<std::size_t>& hidden, Rng& rng)
    : act_dim_(low.size()) {
  if (low.size() != high.size() || low.empty()) throw ConfigError("policy: bad action bounds");
  std::vector<std::size_t> dims{obs_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(2 * act_dim_);
  net_ = Mlp(dims, Activation::kIdentity, rng);
  mid_.resize(static_cast<Eigen::Index>(act_dim_));
  half_.resize(static_cast<Eigen::Index>(act_dim_));
  for (std::size_t i = 0; i < act_dim_; ++i) {
    mid_(static_cast<Eigen::Index>(i)) = 0.5 * (high[i] + low[i]);
    half_(static_cast<Eigen::Index>(i)) = 0.5 * (high[i] - low[i]);
  }
}

StochasticPolicy::TapeSample StochasticPolicy::sample(Tape& tape, Var obs, const Matrix& noise) {
  const auto a = static_cast<Eigen::Index>(act_dim_);
  if (noise.rows() != obs.rows() || noise.cols() != a) throw ShapeError("policy: noise shape");
  Var out = net_.forward(tape, obs);
  Var mean = slice_cols(out, 0, a);
  Var log_std = clamp(slice_cols(out, a, a), kLogStdMin, kLogStdMax);
  Var u = add(mean, mul(exp(log_std), tape.constant(noise)));
  Var t = tanh(u);
  Var action = offset_cols(scale_cols(t, half_), mid_);
  Matrix gauss = -0.5 * noise.array().square() - kHalfLog2Pi;
  Var jac = log(add_scalar(scale_cols(add_scalar(neg(square(t)), 1.0), half_), kSquashEps));
  Var lp = sum_rows(sub(sub(tape.constant(std::move(gauss)), log_std), jac));
  return {action, lp};
}

StochasticPolicy::Sample StochasticPolicy::sample(const Matrix& obs, const Matrix& noise) const {
  const auto a = static_cast<Eigen::Index>(act_dim_);
  if (noise.rows() != obs.rows() || noise.cols() != a) throw ShapeError("policy: noise shape");
  const Matrix out = net_.forward(obs);
  const Matrix mean = out.leftCols(a);
  const Matrix log_std = out.rightCols(a).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  const Matrix u = mean + Matrix(log_std.unaryExpr([](double v) { return std::exp(v); }))
                              .cwiseProduct(noise);
  const Matrix t = u.unaryExpr([](double v) { return tanh_scalar(v); });
  Sample s;
  s.action = (t.array().rowwise() * half_.array()).matrix().rowwise() + mid_;
  Matrix jac = ((1.0 - t.array().square()).rowwise() * half_.array() + kSquashEps)
                   .unaryExpr([](double v) { return std::log(v); });
  Matrix gauss = -0.5 * noise.array().square() - kHalfLog2Pi;
  s.log_prob = (gauss - log_std - jac).rowwise().sum();
  return s;
}

Matrix StochasticPolicy::draw_noise(std::size_t rows, Rng& rng) const {
  Matrix noise(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(act_dim_));
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();
  return noise;
}

StochasticPolicy::Sample StochasticPolicy::sample(const Matrix& obs, Rng& rng) const {
  return sample(obs, draw_noise(static_cast<std::size_t>(obs.rows()), rng));
}

Matrix StochasticPolicy::deterministic(const Matrix& obs) const {
  const auto a = static_cast<Eigen::Index>(act_dim_);
  const Matrix mean = net_.forward(obs).leftCols(a);
  const Matrix t = mean.unaryExpr([](double v) { return tanh_scalar(v); });
  return (t.array().rowwise() * half_.array()).matrix().rowwise() + mid_;
}

Matrix StochasticPolicy::log_prob(const Matrix& obs, const Matrix& action) const {
  const auto a = static_cast<Eigen::Index>(act_dim_);
  if (action.rows() != obs.rows() || action.cols() != a) throw ShapeError("policy: action shape");
  const Matrix out = net_.forward(obs);
  const Matrix mean = out.leftCols(a);
  const Matrix log_std = out.rightCols(a).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  Matrix lp(obs.rows(), 1);
  for (Eigen::Index r = 0; r < obs.rows(); ++r) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < a; ++j) {
      const double y = std::clamp((action(r, j) - mid_(j)) / half_(j), -1.0 + 1e-9, 1.0 - 1e-9);
      const double u = std::atanh(y);
      const double eps = (u - mean(r, j)) / std::exp(log_std(r, j));
      const double t = tanh_scalar(u);
      total += -0.5 * eps * eps - kHalfLog2Pi - log_std(r, j) -
               std::log(half_(j) * (1.0 - t * t) + kSquashEps);
    }
    lp(r, 0) = total;
  }
  return lp;
}

}  // namespace brl
