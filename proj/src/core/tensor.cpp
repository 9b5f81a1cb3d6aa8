#include "brl/core/tensor.hpp"

#include <algorithm>
#include <cmath>

#ifdef __GLIBC__
#include <malloc.h>
#endif
#include <string>

#include "brl/core/errors.hpp"

namespace brl {

namespace {

Tape& same_tape(Var a) {
  if (!a.valid()) throw UsageError("operation on an unrecorded variable");
  return *a.tape();
}

Tape& same_tape(Var a, Var b) {
  Tape& t = same_tape(a);
  if (b.tape() != &t) throw UsageError("variables belong to different tapes");
  return t;
}

void require_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

template <typename F>
Matrix map(const Matrix& m, F f) {
  return m.unaryExpr(f);
}

#ifdef __GLIBC__
// Batch matrices sit just above glibc's default mmap threshold, which turns
// every temporary into an mmap/munmap pair. Keep them on the heap instead.
const bool g_malloc_tuned = [] {
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 128 << 20);
  return true;
}();
#endif

}  // namespace

double tanh_scalar(double x) {
  const double a = std::abs(x);
  if (a < 1e-3) {
    const double x2 = x * x;
    return x - x * x2 * (1.0 / 3.0 - x2 * (2.0 / 15.0));
  }
  if (a > 20.0) return x > 0.0 ? 1.0 : -1.0;
  if (std::isnan(x)) return x;
  double t;
  if (a < 0.5) {
    const double em1 = std::expm1(2.0 * a);
    t = em1 / (em1 + 2.0);
  } else {
    t = 1.0 - 2.0 / (std::exp(2.0 * a) + 1.0);
  }
  return x < 0.0 ? -t : t;
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix row_matrix(std::span<const double> values) {
  Matrix m(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = values[i];
  return m;
}

Vector to_vector(const Matrix& m) {
  return Vector(m.data(), m.data() + m.size());
}

const Matrix& Var::value() const {
  if (!valid()) throw UsageError("variable has not been recorded on a tape");
  return tape_->value(id_);
}

double Var::item() const {
  const Matrix& v = value();
  if (v.size() != 1) throw ShapeError("item() on a non-scalar variable");
  return v(0, 0);
}

// ---- Tape -------------------------------------------------------------------

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::input(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(std::span<const double> values, std::span<double> grads,
                    Eigen::Index rows, Eigen::Index cols) {
  const auto n_expected = static_cast<std::size_t>(rows * cols);
  if (values.size() != n_expected || grads.size() != n_expected) {
    throw ShapeError("parameter: storage does not match declared shape");
  }
  Node n;
  n.value = Eigen::Map<const Matrix>(values.data(), rows, cols);
  n.grad_sink = grads;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents,
                 BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& p : parents) {
    if (p.tape() != this) throw UsageError("parent recorded on another tape");
    n.requires_grad = n.requires_grad || nodes_[p.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(std::size_t id, const Matrix& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) throw UsageError("backward called before any forward pass");
  if (loss.tape() != this || loss.id() >= nodes_.size()) {
    throw UsageError("backward: loss does not belong to this tape");
  }
  if (nodes_[loss.id()].value.size() != 1) {
    throw UsageError("backward: loss must be a scalar");
  }
  for (Node& n : nodes_) n.has_grad = false;

  accumulate(loss.id(), Matrix::Ones(1, 1));
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.has_grad && n.backward) n.backward(*this, id, n.grad);
  }
  for (Node& n : nodes_) {
    if (!n.requires_grad) continue;
    if (!n.has_grad) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    if (!n.grad_sink.empty()) {
      const double* g = n.grad.data();
      for (std::size_t i = 0; i < n.grad_sink.size(); ++i) n.grad_sink[i] += g[i];
    }
  }
  backward_done_ = true;
}

const Matrix& Tape::grad(Var v) const {
  if (!backward_done_) throw UsageError("grad requested before backward");
  if (v.tape() != this) throw UsageError("grad: variable belongs to another tape");
  const Node& n = nodes_[v.id()];
  if (!n.requires_grad) throw UsageError("grad: variable does not require gradient");
  return n.grad;
}

// ---- ops --------------------------------------------------------------------

Var matmul_transposed(Var x, Var w) {
  Tape& t = same_tape(x, w);
  if (x.cols() != w.cols()) {
    throw ShapeError("matmul: input has " + std::to_string(x.cols()) +
                     " columns, weight expects " + std::to_string(w.cols()));
  }
  Matrix out = x.value() * w.value().transpose();
  const std::size_t xi = x.id(), wi = w.id();
  return t.record(std::move(out), {x, w},
                  [xi, wi](Tape& tp, std::size_t, const Matrix& g) {
                    if (tp.requires_grad(xi)) tp.accumulate(xi, g * tp.value(wi));
                    if (tp.requires_grad(wi)) {
                      tp.accumulate(wi, g.transpose() * tp.value(xi));
                    }
                  });
}

Var add_row(Var x, Var row) {
  Tape& t = same_tape(x, row);
  if (row.rows() != 1 || row.cols() != x.cols()) throw ShapeError("add_row: shape mismatch");
  Matrix out = x.value().rowwise() + row.value().row(0);
  const std::size_t xi = x.id(), ri = row.id();
  return t.record(std::move(out), {x, row},
                  [xi, ri](Tape& tp, std::size_t, const Matrix& g) {
                    tp.accumulate(xi, g);
                    if (tp.requires_grad(ri)) tp.accumulate(ri, g.colwise().sum());
                  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, "add");
  const std::size_t ai = a.id(), bi = b.id();
  return t.record(a.value() + b.value(), {a, b},
                  [ai, bi](Tape& tp, std::size_t, const Matrix& g) {
                    tp.accumulate(ai, g);
                    tp.accumulate(bi, g);
                  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, "sub");
  const std::size_t ai = a.id(), bi = b.id();
  return t.record(a.value() - b.value(), {a, b},
                  [ai, bi](Tape& tp, std::size_t, const Matrix& g) {
                    tp.accumulate(ai, g);
                    if (tp.requires_grad(bi)) tp.accumulate(bi, -g);
                  });
}

Var mul(Var a, Var b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, "mul");
  const std::size_t ai = a.id(), bi = b.id();
  Matrix out = a.value().cwiseProduct(b.value());
  return t.record(std::move(out), {a, b},
                  [ai, bi](Tape& tp, std::size_t, const Matrix& g) {
                    if (tp.requires_grad(ai)) tp.accumulate(ai, g.cwiseProduct(tp.value(bi)));
                    if (tp.requires_grad(bi)) tp.accumulate(bi, g.cwiseProduct(tp.value(ai)));
                  });
}

Var mul_col(Var a, Var col) {
  Tape& t = same_tape(a, col);
  if (col.cols() != 1 || col.rows() != a.rows()) throw ShapeError("mul_col: shape mismatch");
  Matrix out = a.value().array().colwise() * col.value().col(0).array();
  const std::size_t ai = a.id(), ci = col.id();
  return t.record(std::move(out), {a, col},
                  [ai, ci](Tape& tp, std::size_t, const Matrix& g) {
                    if (tp.requires_grad(ai)) {
                      Matrix ga = g.array().colwise() * tp.value(ci).col(0).array();
                      tp.accumulate(ai, ga);
                    }
                    if (tp.requires_grad(ci)) {
                      Matrix gc = g.cwiseProduct(tp.value(ai)).rowwise().sum();
                      tp.accumulate(ci, gc);
                    }
                  });
}

Var scale(Var a, double s) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  return t.record(a.value() * s, {a},
                  [ai, s](Tape& tp, std::size_t, const Matrix& g) { tp.accumulate(ai, g * s); });
}

Var add_scalar(Var a, double s) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  Matrix out = a.value().array() + s;
  return t.record(std::move(out), {a},
                  [ai](Tape& tp, std::size_t, const Matrix& g) { tp.accumulate(ai, g); });
}

Var scale_cols(Var a, const RowVector& s) {
  Tape& t = same_tape(a);
  if (s.cols() != a.cols()) throw ShapeError("scale_cols: shape mismatch");
  const std::size_t ai = a.id();
  Matrix out = a.value().array().rowwise() * s.array();
  return t.record(std::move(out), {a},
                  [ai, s](Tape& tp, std::size_t, const Matrix& g) {
                    Matrix ga = g.array().rowwise() * s.array();
                    tp.accumulate(ai, ga);
                  });
}

Var offset_cols(Var a, const RowVector& s) {
  Tape& t = same_tape(a);
  if (s.cols() != a.cols()) throw ShapeError("offset_cols: shape mismatch");
  const std::size_t ai = a.id();
  Matrix out = a.value().rowwise() + s;
  return t.record(std::move(out), {a},
                  [ai](Tape& tp, std::size_t, const Matrix& g) { tp.accumulate(ai, g); });
}

Var neg(Var a) { return scale(a, -1.0); }

Var tanh(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  return t.record(map(a.value(), [](double v) { return tanh_scalar(v); }), {a},
                  [ai](Tape& tp, std::size_t self, const Matrix& g) {
                    const Matrix& y = tp.value(self);
                    Matrix ga = g.array() * (1.0 - y.array().square());
                    tp.accumulate(ai, ga);
                  });
}

Var sigmoid(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  return t.record(map(a.value(), sigmoid_scalar), {a},
                  [ai](Tape& tp, std::size_t self, const Matrix& g) {
                    const Matrix& y = tp.value(self);
                    Matrix ga = g.array() * y.array() * (1.0 - y.array());
                    tp.accumulate(ai, ga);
                  });
}

Var exp(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  return t.record(map(a.value(), [](double v) { return std::exp(v); }), {a},
                  [ai](Tape& tp, std::size_t self, const Matrix& g) {
                    tp.accumulate(ai, g.cwiseProduct(tp.value(self)));
                  });
}

Var log(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  return t.record(map(a.value(), [](double v) { return std::log(v); }), {a},
                  [ai](Tape& tp, std::size_t, const Matrix& g) {
                    Matrix ga = g.array() / tp.value(ai).array();
                    tp.accumulate(ai, ga);
                  });
}

Var square(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  Matrix out = a.value().array().square();
  return t.record(std::move(out), {a},
                  [ai](Tape& tp, std::size_t, const Matrix& g) {
                    Matrix ga = 2.0 * g.array() * tp.value(ai).array();
                    tp.accumulate(ai, ga);
                  });
}

Var clamp(Var a, double lo, double hi) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  Matrix out = a.value().cwiseMax(lo).cwiseMin(hi);
  return t.record(std::move(out), {a},
                  [ai, lo, hi](Tape& tp, std::size_t, const Matrix& g) {
                    const Matrix& x = tp.value(ai);
                    Matrix ga = g;
                    for (Eigen::Index i = 0; i < x.size(); ++i) {
                      const double v = x.data()[i];
                      if (!(v > lo && v < hi)) ga.data()[i] = 0.0;
                    }
                    tp.accumulate(ai, ga);
                  });
}

namespace {

// Shared body of minimum/maximum: `pick_a(x, y)` says whether a wins.
template <typename Pick>
Var select_elementwise(Var a, Var b, const char* name, Pick pick_a) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, name);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  Matrix out(av.rows(), av.cols());
  for (Eigen::Index i = 0; i < av.size(); ++i) {
    out.data()[i] = pick_a(av.data()[i], bv.data()[i]) ? av.data()[i] : bv.data()[i];
  }
  const std::size_t ai = a.id(), bi = b.id();
  return t.record(std::move(out), {a, b},
                  [ai, bi, pick_a](Tape& tp, std::size_t, const Matrix& g) {
                    const Matrix& x = tp.value(ai);
                    const Matrix& y = tp.value(bi);
                    Matrix ga = Matrix::Zero(g.rows(), g.cols());
                    Matrix gb = Matrix::Zero(g.rows(), g.cols());
                    for (Eigen::Index i = 0; i < g.size(); ++i) {
                      if (pick_a(x.data()[i], y.data()[i])) {
                        ga.data()[i] = g.data()[i];
                      } else {
                        gb.data()[i] = g.data()[i];
                      }
                    }
                    tp.accumulate(ai, ga);
                    tp.accumulate(bi, gb);
                  });
}

}  // namespace

Var minimum(Var a, Var b) {
  return select_elementwise(a, b, "minimum", [](double x, double y) { return x <= y; });
}

Var maximum(Var a, Var b) {
  return select_elementwise(a, b, "maximum", [](double x, double y) { return x >= y; });
}

Var softmax_rows(Var a) {
  Tape& t = same_tape(a);
  const Matrix& x = a.value();
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
  const std::size_t ai = a.id();
  return t.record(std::move(out), {a},
                  [ai](Tape& tp, std::size_t self, const Matrix& g) {
                    const Matrix& y = tp.value(self);
                    Matrix dot = g.cwiseProduct(y).rowwise().sum();
                    Matrix ga = y.array() * (g.array().colwise() - dot.col(0).array());
                    tp.accumulate(ai, ga);
                  });
}

Var log_softmax_rows(Var a) {
  Tape& t = same_tape(a);
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mx = x.row(r).maxCoeff();
    double total = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) total += std::exp(x(r, c) - mx);
    const double lse = mx + std::log(total);
    for (Eigen::Index c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) - lse;
  }
  const std::size_t ai = a.id();
  return t.record(std::move(out), {a},
                  [ai](Tape& tp, std::size_t self, const Matrix& g) {
                    const Matrix& y = tp.value(self);
                    Matrix gsum = g.rowwise().sum();
                    Matrix soft = y.unaryExpr([](double v) { return std::exp(v); });
                    Matrix ga = g.array() - soft.array().colwise() * gsum.col(0).array();
                    tp.accumulate(ai, ga);
                  });
}

Var sum_rows(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  const Eigen::Index cols = a.cols();
  Matrix out = a.value().rowwise().sum();
  return t.record(std::move(out), {a},
                  [ai, cols](Tape& tp, std::size_t, const Matrix& g) {
                    Matrix ga = g.col(0).replicate(1, cols);
                    tp.accumulate(ai, ga);
                  });
}

Var sum_all(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.record(std::move(out), {a},
                  [ai, rows, cols](Tape& tp, std::size_t, const Matrix& g) {
                    tp.accumulate(ai, Matrix::Constant(rows, cols, g(0, 0)));
                  });
}

Var mean_all(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeError("mean_all: empty input");
  Matrix out(1, 1);
  out(0, 0) = a.value().sum() / n;
  return t.record(std::move(out), {a},
                  [ai, rows, cols, n](Tape& tp, std::size_t, const Matrix& g) {
                    tp.accumulate(ai, Matrix::Constant(rows, cols, g(0, 0) / n));
                  });
}

Var row_norm(Var a) {
  Tape& t = same_tape(a);
  const std::size_t ai = a.id();
  Matrix out = a.value().rowwise().norm();
  return t.record(std::move(out), {a},
                  [ai](Tape& tp, std::size_t self, const Matrix& g) {
                    const Matrix& x = tp.value(ai);
                    const Matrix& n = tp.value(self);
                    Matrix ga = Matrix::Zero(x.rows(), x.cols());
                    for (Eigen::Index r = 0; r < x.rows(); ++r) {
                      if (n(r, 0) > 0.0) ga.row(r) = x.row(r) * (g(r, 0) / n(r, 0));
                    }
                    tp.accumulate(ai, ga);
                  });
}

Var concat_cols(Var a, Var b) {
  Tape& t = same_tape(a, b);
  if (a.rows() != b.rows()) throw ShapeError("concat_cols: row count mismatch");
  const Eigen::Index ac = a.cols(), bc = b.cols();
  Matrix out(a.rows(), ac + bc);
  out.leftCols(ac) = a.value();
  out.rightCols(bc) = b.value();
  const std::size_t ai = a.id(), bi = b.id();
  return t.record(std::move(out), {a, b},
                  [ai, bi, ac, bc](Tape& tp, std::size_t, const Matrix& g) {
                    if (tp.requires_grad(ai)) tp.accumulate(ai, g.leftCols(ac));
                    if (tp.requires_grad(bi)) tp.accumulate(bi, g.rightCols(bc));
                  });
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
  Tape& t = same_tape(a);
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw ShapeError("slice_cols: range out of bounds");
  }
  const std::size_t ai = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Matrix out = a.value().middleCols(start, count);
  return t.record(std::move(out), {a},
                  [ai, rows, cols, start, count](Tape& tp, std::size_t, const Matrix& g) {
                    Matrix ga = Matrix::Zero(rows, cols);
                    ga.middleCols(start, count) = g;
                    tp.accumulate(ai, ga);
                  });
}

Var gather_cols(Var a, std::span<const std::size_t> cols) {
  Tape& t = same_tape(a);
  if (static_cast<Eigen::Index>(cols.size()) != a.rows()) {
    throw ShapeError("gather_cols: need one column index per row");
  }
  Matrix out(a.rows(), 1);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const auto c = static_cast<Eigen::Index>(cols[static_cast<std::size_t>(r)]);
    if (c >= a.cols()) throw ShapeError("gather_cols: column index out of range");
    out(r, 0) = a.value()(r, c);
  }
  const std::size_t ai = a.id();
  std::vector<std::size_t> picked(cols.begin(), cols.end());
  const Eigen::Index rows = a.rows(), ncols = a.cols();
  return t.record(std::move(out), {a},
                  [ai, picked = std::move(picked), rows, ncols](Tape& tp, std::size_t,
                                                                const Matrix& g) {
                    Matrix ga = Matrix::Zero(rows, ncols);
                    for (Eigen::Index r = 0; r < rows; ++r) {
                      ga(r, static_cast<Eigen::Index>(picked[static_cast<std::size_t>(r)])) =
                          g(r, 0);
                    }
                    tp.accumulate(ai, ga);
                  });
}

}  // namespace brl
