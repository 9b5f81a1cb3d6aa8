#include "brl/core/mlp.hpp"

#include <cmath>
#include <string>

#include "brl/core/errors.hpp"

namespace brl {

Activation activation_from_code(std::uint8_t code) {
  if (code > static_cast<std::uint8_t>(Activation::kSigmoid)) {
    throw FormatError("unknown activation code " + std::to_string(code));
  }
  return static_cast<Activation>(code);
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftmax: return "softmax";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

Matrix apply_activation(const Matrix& x, Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return x;
    case Activation::kTanh:
      return x.unaryExpr([](double v) { return tanh_scalar(v); });
    case Activation::kSigmoid:
      return x.unaryExpr([](double v) { return sigmoid_scalar(v); });
    case Activation::kSoftmax: {
      Matrix out(x.rows(), x.cols());
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mx = x.row(r).maxCoeff();
        double total = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
          out(r, c) = std::exp(x(r, c) - mx);
          total += out(r, c);
        }
        out.row(r) /= total;
      }
      return out;
    }
  }
  return x;
}

namespace {

Var apply_activation(Var x, Activation a) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kTanh: return tanh(x);
    case Activation::kSigmoid: return sigmoid(x);
    case Activation::kSoftmax: return softmax_rows(x);
  }
  return x;
}

std::vector<std::size_t> layer_offsets(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw ConfigError("Mlp needs at least an input and an output size");
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] == 0 || dims[l + 1] == 0) throw ConfigError("Mlp layer sizes must be positive");
    offsets.push_back(offset);
    offset += dims[l + 1] * dims[l] + dims[l + 1];
  }
  offsets.push_back(offset);
  return offsets;
}

}  // namespace

Mlp::Mlp(std::vector<std::size_t> layer_dims, Activation output)
    : dims_(std::move(layer_dims)), output_(output), offsets_(layer_offsets(dims_)),
      params_(offsets_.back()) {}

Mlp::Mlp(std::vector<std::size_t> layer_dims, Activation output, Rng& rng)
    : Mlp(std::move(layer_dims), output) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const double bound = std::sqrt(1.0 / static_cast<double>(dims_[l]));
    for (double& w : weights(l)) w = rng.uniform(-bound, bound);
    for (double& b : biases(l)) b = rng.uniform(-bound, bound);
  }
}

Activation Mlp::layer_activation(std::size_t layer) const {
  return layer + 1 == num_layers() ? output_ : Activation::kTanh;
}

std::span<const double> Mlp::weights(std::size_t layer) const {
  return {params_.values.data() + offsets_[layer], dims_[layer + 1] * dims_[layer]};
}

std::span<const double> Mlp::biases(std::size_t layer) const {
  return {params_.values.data() + offsets_[layer] + dims_[layer + 1] * dims_[layer],
          dims_[layer + 1]};
}

std::span<double> Mlp::weights(std::size_t layer) {
  return {params_.values.data() + offsets_[layer], dims_[layer + 1] * dims_[layer]};
}

std::span<double> Mlp::biases(std::size_t layer) {
  return {params_.values.data() + offsets_[layer] + dims_[layer + 1] * dims_[layer],
          dims_[layer + 1]};
}

void Mlp::check_input(Eigen::Index cols) const {
  if (static_cast<std::size_t>(cols) != input_dim()) {
    throw ShapeError("Mlp input has " + std::to_string(cols) + " features, expected " +
                     std::to_string(input_dim()));
  }
}

Var Mlp::forward_impl(Tape& tape, Var input, double* grads) const {
  check_input(input.cols());
  Var h = input;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const auto out = static_cast<Eigen::Index>(dims_[l + 1]);
    const auto in = static_cast<Eigen::Index>(dims_[l]);
    Var w, b;
    if (grads != nullptr) {
      const std::size_t wo = offsets_[l];
      const std::size_t bo = wo + dims_[l + 1] * dims_[l];
      w = tape.parameter(weights(l), {grads + wo, dims_[l + 1] * dims_[l]}, out, in);
      b = tape.parameter(biases(l), {grads + bo, dims_[l + 1]}, 1, out);
    } else {
      w = tape.constant(Eigen::Map<const Matrix>(weights(l).data(), out, in));
      b = tape.constant(Eigen::Map<const Matrix>(biases(l).data(), 1, out));
    }
    h = apply_activation(add_row(matmul_transposed(h, w), b), layer_activation(l));
  }
  return h;
}

Var Mlp::forward(Tape& tape, Var input) {
  return forward_impl(tape, input, params_.grads.data());
}

Var Mlp::forward_frozen(Tape& tape, Var input) const {
  return forward_impl(tape, input, nullptr);
}

Matrix Mlp::forward(const Matrix& input) const {
  check_input(input.cols());
  Matrix h = input;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const auto out = static_cast<Eigen::Index>(dims_[l + 1]);
    const auto in = static_cast<Eigen::Index>(dims_[l]);
    Eigen::Map<const Matrix> w(weights(l).data(), out, in);
    Eigen::Map<const Matrix> b(biases(l).data(), 1, out);
    Matrix z = h * w.transpose();
    z = z.rowwise() + b.row(0);
    h = apply_activation(z, layer_activation(l));
  }
  return h;
}

Vector Mlp::forward(std::span<const double> input) const {
  return to_vector(forward(row_matrix(input)));
}

bool Mlp::same_shape(const Mlp& other) const {
  return dims_ == other.dims_ && output_ == other.output_;
}

void Mlp::copy_params_from(const Mlp& other) {
  if (!same_shape(other)) throw ShapeError("copy_params_from: network shapes differ");
  params_.values = other.params_.values;
}

void Mlp::polyak_from(const Mlp& online, double tau) {
  if (!same_shape(online)) throw ShapeError("polyak_from: network shapes differ");
  if (tau == 1.0) {
    params_.values = online.params_.values;
    return;
  }
  if (tau == 0.0) return;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_.values[i] = tau * online.params_.values[i] + (1.0 - tau) * params_.values[i];
  }
}

Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
             Activation output, Rng& rng) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return Mlp(std::move(dims), output, rng);
}

Var mse(Var prediction, Var target) { return mean_all(square(sub(prediction, target))); }

}  // namespace brl
