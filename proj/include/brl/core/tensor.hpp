#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace brl {

// Batch-major dense matrix: one row per sample, one column per feature.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = std::vector<double>;

Matrix row_matrix(std::span<const double> values);
Vector to_vector(const Matrix& m);

// Scalar activations shared by the tape and the plain forward passes so both
// produce identical bits. tanh_scalar goes through exp (libm tanh is several
// times slower); it agrees with std::tanh to a few ulp.
double tanh_scalar(double x);
double sigmoid_scalar(double x);

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  // Scalar value of a 1x1 node.
  double item() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode tape. Nodes are recorded in creation order, which is already a
// topological order, so backward() is a single reverse sweep. A tape is built
// fresh for every loss evaluation and discarded afterwards.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Node that never receives gradient.
  Var constant(Matrix value);
  // Node whose gradient is kept and readable through grad() after backward().
  Var input(Matrix value);
  // Node backed by external parameter storage. After backward() its gradient
  // is added (row-major) into `grads`, which must have rows*cols entries.
  Var parameter(std::span<const double> values, std::span<double> grads,
                Eigen::Index rows, Eigen::Index cols);

  // Back-propagates from a 1x1 node. Throws UsageError when `loss` is not on
  // this tape, is not scalar, or nothing has been recorded yet.
  void backward(Var loss);

  // Gradient of the last backward() loss with respect to `v`.
  const Matrix& grad(Var v) const;

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  std::size_t size() const { return nodes_.size(); }

  // Records an op result. `backward` receives the node's own id and its
  // output gradient and pushes contributions into parents via accumulate().
  using BackwardFn = std::function<void(Tape&, std::size_t, const Matrix&)>;
  Var record(Matrix value, std::initializer_list<Var> parents, BackwardFn backward);

  void accumulate(std::size_t id, const Matrix& g);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    std::span<double> grad_sink;
    bool requires_grad = false;
    bool has_grad = false;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

// ---- differentiable ops ----------------------------------------------------
// All ops take nodes from the same tape and record their result there.
// Shapes follow Eigen conventions; mismatches throw ShapeError.

Var matmul_transposed(Var x, Var w);  // x * w^T  (B x in) * (out x in)^T
Var add_row(Var x, Var row);          // broadcast a 1 x C row over every row
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);                // elementwise
Var mul_col(Var a, Var col);          // scale each row of a by col(i, 0)
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var scale_cols(Var a, const RowVector& s);     // a(i, j) * s(j)
Var offset_cols(Var a, const RowVector& s);    // a(i, j) + s(j)
Var neg(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);
Var clamp(Var a, double lo, double hi);  // gradient passes only strictly inside
Var minimum(Var a, Var b);               // ties route gradient to a
Var maximum(Var a, Var b);               // ties route gradient to a
Var softmax_rows(Var a);
Var log_softmax_rows(Var a);
Var sum_rows(Var a);   // B x C -> B x 1
Var sum_all(Var a);    // -> 1 x 1
Var mean_all(Var a);   // -> 1 x 1
Var row_norm(Var a);   // B x C -> B x 1 Euclidean norm; zero rows get zero gradient
Var concat_cols(Var a, Var b);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index count);
Var gather_cols(Var a, std::span<const std::size_t> cols);  // B x C -> B x 1, picks a(i, cols[i])

}  // namespace brl
