#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "brl/core/params.hpp"
#include "brl/core/rng.hpp"
#include "brl/core/tensor.hpp"

namespace brl {

enum class Activation : std::uint8_t {
  kIdentity = 0,
  kTanh = 1,
  kSoftmax = 2,
  kSigmoid = 3,
};

Activation activation_from_code(std::uint8_t code);
std::string_view activation_name(Activation a);

// Fully connected network with tanh hidden layers. Parameters live in one flat
// ParamVector laid out per layer as [W (out x in, row-major), b (out)].
class Mlp {
 public:
  Mlp() = default;
  // Weights and biases drawn uniformly in +-sqrt(1/fan_in).
  Mlp(std::vector<std::size_t> layer_dims, Activation output, Rng& rng);
  // All-zero parameters.
  Mlp(std::vector<std::size_t> layer_dims, Activation output);

  // Recorded forward pass; gradients reach params().grads after backward().
  Var forward(Tape& tape, Var input);
  // Recorded forward pass treating parameters as constants. Gradient still
  // flows into `input`.
  Var forward_frozen(Tape& tape, Var input) const;

  Matrix forward(const Matrix& input) const;
  Vector forward(std::span<const double> input) const;

  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }
  std::size_t num_layers() const { return dims_.size() - 1; }
  const std::vector<std::size_t>& layer_dims() const { return dims_; }
  Activation output_activation() const { return output_; }
  Activation layer_activation(std::size_t layer) const;

  ParamVector& params() { return params_; }
  const ParamVector& params() const { return params_; }

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> biases(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);

  bool same_shape(const Mlp& other) const;
  void copy_params_from(const Mlp& other);
  // target <- tau * online + (1 - tau) * target
  void polyak_from(const Mlp& online, double tau);

 private:
  Var forward_impl(Tape& tape, Var input, double* grads) const;
  void check_input(Eigen::Index cols) const;
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<std::size_t> dims_{1, 1};
  Activation output_ = Activation::kIdentity;
  std::vector<std::size_t> offsets_;
  ParamVector params_;
};

Matrix apply_activation(const Matrix& x, Activation a);

// Network with dims [in, hidden..., out].
Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
             Activation output, Rng& rng);

// Mean squared error of every entry, recorded on the tape: mean((a - b)^2).
Var mse(Var prediction, Var target);

}  // namespace brl
