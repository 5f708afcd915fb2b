// Copyright 2026 The TEAM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reverse-mode differentiation over a fixed operator set.
//
// A Tape records every operation of one forward pass in creation order, which
// is already a topological order. backward() walks it in reverse and
// accumulates gradients into the Parameters the leaves were created from.

#include "team/nn/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace team::nn {

class Tape;

/// Handle to a node on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf bound to a parameter. Its gradient is added to p.grad on backward()
  /// when the parameter is trainable.
  Var param(Parameter& p) {
    Node n;
    n.external = &p.value;
    n.param = &p;
    n.requires_grad = p.trainable;
    return push(std::move(n));
  }

  Var constant(Matrix value) {
    Node n;
    n.value = std::move(value);
    return push(std::move(n));
  }

  Var scalar(double v) { return constant(Matrix::Constant(1, 1, v)); }

  const Matrix& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.external ? *n.external : n.value;
  }

  double item(Var v) const {
    const Matrix& m = value(v);
    if (m.size() != 1) throw ShapeError("item() on non-scalar " + shape_str(m));
    return m(0, 0);
  }

  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  /// Gradient of the last backward() target with respect to v (zeros if unreached).
  Matrix grad_of(Var v) const {
    const Node& n = nodes_[v.id];
    if (n.grad.size() == 0) return Matrix::Zero(value(v).rows(), value(v).cols());
    return n.grad;
  }

  std::size_t size() const { return nodes_.size(); }

  void backward(Var loss) {
    if (value(loss).size() != 1) throw ShapeError("backward() needs a scalar loss");
    for (auto& n : nodes_) n.grad.resize(0, 0);
    grad(loss.id).setConstant(1.0);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.requires_grad || n.grad.size() == 0) continue;
      if (n.backward) n.backward(*this, i);
      if (n.param != nullptr) n.param->grad += n.grad;
    }
  }

  // Op plumbing. Used by the free functions below.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Var emit(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
    Node n;
    n.value = std::move(value);
    for (Var in : inputs) n.requires_grad = n.requires_grad || requires_grad(in);
    if (n.requires_grad) n.backward = std::move(fn);
    return push(std::move(n));
  }

  Var emit(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
    Node n;
    n.value = std::move(value);
    for (Var in : inputs) n.requires_grad = n.requires_grad || requires_grad(in);
    if (n.requires_grad) n.backward = std::move(fn);
    return push(std::move(n));
  }

  /// Lazily zero-initialised gradient buffer of node `id`.
  Matrix& grad(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) {
      const Matrix& v = n.external ? *n.external : n.value;
      n.grad = Matrix::Zero(v.rows(), v.cols());
    }
    return n.grad;
  }

  const Matrix& grad_view(std::size_t id) const { return nodes_[id].grad; }
  const Matrix& value_at(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  bool wants_grad(std::size_t id) const { return nodes_[id].requires_grad; }

 private:
  struct Node {
    Matrix value;
    const Matrix* external = nullptr;
    Matrix grad;
    Parameter* param = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var push(Node n) {
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
  }

  std::vector<Node> nodes_;
};

namespace detail {

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename F>
Matrix map(const Matrix& m, F f) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.size(); ++i) out.data()[i] = f(m.data()[i]);
  return out;
}

}  // namespace detail

inline Var matmul(Var a, Var b) {
  Tape& t = *a.tape;
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: " + shape_str(av) + " x " + shape_str(bv));
  return t.emit(av * bv, {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    if (t.wants_grad(a.id)) t.grad(a.id).noalias() += g * t.value_at(b.id).transpose();
    if (t.wants_grad(b.id)) t.grad(b.id).noalias() += t.value_at(a.id).transpose() * g;
  });
}

inline Var add(Var a, Var b) {
  Tape& t = *a.tape;
  detail::require_same_shape(t.value(a), t.value(b), "add");
  return t.emit(t.value(a) + t.value(b), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    if (t.wants_grad(a.id)) t.grad(a.id) += g;
    if (t.wants_grad(b.id)) t.grad(b.id) += g;
  });
}

inline Var sub(Var a, Var b) {
  Tape& t = *a.tape;
  detail::require_same_shape(t.value(a), t.value(b), "sub");
  return t.emit(t.value(a) - t.value(b), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    if (t.wants_grad(a.id)) t.grad(a.id) += g;
    if (t.wants_grad(b.id)) t.grad(b.id) -= g;
  });
}

/// Elementwise product.
inline Var mul(Var a, Var b) {
  Tape& t = *a.tape;
  detail::require_same_shape(t.value(a), t.value(b), "mul");
  return t.emit(t.value(a).cwiseProduct(t.value(b)), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    if (t.wants_grad(a.id)) t.grad(a.id) += g.cwiseProduct(t.value_at(b.id));
    if (t.wants_grad(b.id)) t.grad(b.id) += g.cwiseProduct(t.value_at(a.id));
  });
}

/// x (n x m) plus a 1 x m row broadcast over every row.
inline Var add_row(Var x, Var row) {
  Tape& t = *x.tape;
  const Matrix& xv = t.value(x);
  const Matrix& rv = t.value(row);
  if (rv.rows() != 1 || rv.cols() != xv.cols())
    throw ShapeError("add_row: " + shape_str(xv) + " + " + shape_str(rv));
  Matrix out = xv.rowwise() + rv.row(0);
  return t.emit(std::move(out), {x, row}, [x, row](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    if (t.wants_grad(x.id)) t.grad(x.id) += g;
    if (t.wants_grad(row.id)) t.grad(row.id) += g.colwise().sum();
  });
}

/// scale * a + shift, elementwise.
inline Var affine(Var a, double scale, double shift = 0.0) {
  Tape& t = *a.tape;
  Matrix out = (t.value(a).array() * scale + shift).matrix();
  return t.emit(std::move(out), {a}, [a, scale](Tape& t, std::size_t self) {
    t.grad(a.id) += scale * t.grad_view(self);
  });
}

inline Var scale(Var a, double s) { return affine(a, s, 0.0); }

inline Var relu(Var a) {
  Tape& t = *a.tape;
  Matrix out = t.value(a).cwiseMax(0.0);
  return t.emit(std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Matrix& x = t.value_at(a.id);
    const Matrix& g = t.grad_view(self);
    Matrix& ga = t.grad(a.id);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x.data()[i] > 0) ga.data()[i] += g.data()[i];
  });
}

inline Var tanh(Var a) {
  Tape& t = *a.tape;
  Matrix out = t.value(a).array().tanh().matrix();
  return t.emit(std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Matrix& y = t.value_at(self);
    t.grad(a.id) += t.grad_view(self).cwiseProduct((1.0 - y.array().square()).matrix());
  });
}

inline Var softplus(Var a) {
  Tape& t = *a.tape;
  Matrix out = detail::map(t.value(a), detail::softplus);
  return t.emit(std::move(out), {a}, [a](Tape& t, std::size_t self) {
    t.grad(a.id) += t.grad_view(self).cwiseProduct(detail::map(t.value_at(a.id), detail::sigmoid));
  });
}

inline Var exp(Var a) {
  Tape& t = *a.tape;
  Matrix out = t.value(a).array().exp().matrix();
  return t.emit(std::move(out), {a}, [a](Tape& t, std::size_t self) {
    t.grad(a.id) += t.grad_view(self).cwiseProduct(t.value_at(self));
  });
}

/// Row-wise softmax with max shift.
inline Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

inline Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    out.row(r) = (logits.row(r).array() - lse).matrix();
  }
  return out;
}

inline Var softmax(Var a) {
  Tape& t = *a.tape;
  return t.emit(softmax_rows(t.value(a)), {a}, [a](Tape& t, std::size_t self) {
    const Matrix& y = t.value_at(self);
    const Matrix& g = t.grad_view(self);
    // dx = y * (g - <g, y>) per row
    Eigen::VectorXd dots = g.cwiseProduct(y).rowwise().sum();
    Matrix dx = y.cwiseProduct((g.colwise() - dots));
    t.grad(a.id) += dx;
  });
}

inline Var log_softmax(Var a) {
  Tape& t = *a.tape;
  return t.emit(log_softmax_rows(t.value(a)), {a}, [a](Tape& t, std::size_t self) {
    const Matrix& logp = t.value_at(self);
    const Matrix& g = t.grad_view(self);
    Eigen::VectorXd gsum = g.rowwise().sum();
    Matrix p = logp.array().exp().matrix();
    Matrix dx = g - (p.array().colwise() * gsum.array()).matrix();
    t.grad(a.id) += dx;
  });
}

/// Sum of all entries, as a 1x1.
inline Var sum(Var a) {
  Tape& t = *a.tape;
  return t.emit(Matrix::Constant(1, 1, t.value(a).sum()), {a}, [a](Tape& t, std::size_t self) {
    t.grad(a.id).array() += t.grad_view(self)(0, 0);
  });
}

inline Var mean(Var a) {
  const auto n = static_cast<double>(a.tape->value(a).size());
  return scale(sum(a), 1.0 / n);
}

/// Per-row sums, n x 1.
inline Var row_sum(Var a) {
  Tape& t = *a.tape;
  Matrix out = t.value(a).rowwise().sum();
  return t.emit(std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    Matrix& ga = t.grad(a.id);
    ga.colwise() += Eigen::VectorXd(g.col(0));
  });
}

/// Rows of `table` selected by `ids` (embedding lookup).
inline Var gather_rows(Var table, std::vector<std::uint32_t> ids) {
  Tape& t = *table.tape;
  const Matrix& tv = t.value(table);
  Matrix out(static_cast<Eigen::Index>(ids.size()), tv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= static_cast<std::uint32_t>(tv.rows()))
      throw ShapeError("gather_rows: id " + std::to_string(ids[i]) + " out of range " +
                       shape_str(tv));
    out.row(static_cast<Eigen::Index>(i)) = tv.row(ids[i]);
  }
  return t.emit(std::move(out), {table}, [table, ids = std::move(ids)](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    Matrix& gt = t.grad(table.id);
    for (std::size_t i = 0; i < ids.size(); ++i) gt.row(ids[i]) += g.row(static_cast<Eigen::Index>(i));
  });
}

/// Horizontal concatenation of equally tall blocks.
inline Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Tape& t = *parts.front().tape;
  const Eigen::Index rows = t.value(parts.front()).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    if (t.value(p).rows() != rows) throw ShapeError("concat_cols: row mismatch");
    cols += t.value(p).cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (Var p : parts) {
    out.middleCols(c, t.value(p).cols()) = t.value(p);
    c += t.value(p).cols();
  }
  return t.emit(std::move(out), std::span<const Var>(parts), [parts](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    Eigen::Index c = 0;
    for (Var p : parts) {
      const Eigen::Index w = t.value_at(p.id).cols();
      if (t.wants_grad(p.id)) t.grad(p.id) += g.middleCols(c, w);
      c += w;
    }
  });
}

/// Picks logp(r, labels[r]) for every row, n x 1.
inline Var pick(Var a, std::vector<std::size_t> labels) {
  Tape& t = *a.tape;
  const Matrix& av = t.value(a);
  if (static_cast<Eigen::Index>(labels.size()) != av.rows()) throw ShapeError("pick: row count");
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] >= static_cast<std::size_t>(av.cols())) throw ShapeError("pick: label out of range");
    out(static_cast<Eigen::Index>(r), 0) = av(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(labels[r]));
  }
  return t.emit(std::move(out), {a}, [a, labels = std::move(labels)](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_view(self);
    Matrix& ga = t.grad(a.id);
    for (std::size_t r = 0; r < labels.size(); ++r)
      ga(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(labels[r])) += g(static_cast<Eigen::Index>(r), 0);
  });
}

/// Floored categorical KL per row: sum_i p_i ln((p_i + eps) / (q_i + eps)), n x 1.
inline Var kl_rows(Var p, Var q, double eps = kProbFloor) {
  Tape& t = *p.tape;
  const Matrix& pv = t.value(p);
  const Matrix& qv = t.value(q);
  detail::require_same_shape(pv, qv, "kl_rows");
  Matrix out(pv.rows(), 1);
  for (Eigen::Index r = 0; r < pv.rows(); ++r) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < pv.cols(); ++i)
      s += pv(r, i) * std::log((pv(r, i) + eps) / (qv(r, i) + eps));
    out(r, 0) = s;
  }
  return t.emit(std::move(out), {p, q}, [p, q, eps](Tape& t, std::size_t self) {
    const Matrix& pv = t.value_at(p.id);
    const Matrix& qv = t.value_at(q.id);
    const Matrix& g = t.grad_view(self);
    const bool gp = t.wants_grad(p.id);
    const bool gq = t.wants_grad(q.id);
    for (Eigen::Index r = 0; r < pv.rows(); ++r) {
      const double gr = g(r, 0);
      for (Eigen::Index i = 0; i < pv.cols(); ++i) {
        const double pe = pv(r, i) + eps;
        const double qe = qv(r, i) + eps;
        if (gp) t.grad(p.id)(r, i) += gr * (std::log(pe / qe) + pv(r, i) / pe);
        if (gq) t.grad(q.id)(r, i) -= gr * pv(r, i) / qe;
      }
    }
  });
}

/// Harmonic-KL similarity per row from the two directed divergences (n x 1 each):
/// 1 / (1 + a*b/(a+b)), and exactly 1 where a + b == 0.
inline Var harmonic_similarity(Var a, Var b) {
  Tape& t = *a.tape;
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  detail::require_same_shape(av, bv, "harmonic_similarity");
  Matrix out(av.rows(), av.cols());
  for (Eigen::Index i = 0; i < av.size(); ++i) {
    const double x = av.data()[i];
    const double y = bv.data()[i];
    const double s = x + y;
    out.data()[i] = s > 0.0 ? 1.0 / (1.0 + x * y / s) : 1.0;
  }
  return t.emit(std::move(out), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& av = t.value_at(a.id);
    const Matrix& bv = t.value_at(b.id);
    const Matrix& o = t.value_at(self);
    const Matrix& g = t.grad_view(self);
    for (Eigen::Index i = 0; i < av.size(); ++i) {
      const double x = av.data()[i];
      const double y = bv.data()[i];
      const double s = x + y;
      if (!(s > 0.0)) continue;
      // dO/dH = -O^2, dH/dx = y^2/s^2, dH/dy = x^2/s^2
      const double common = -g.data()[i] * o.data()[i] * o.data()[i] / (s * s);
      if (t.wants_grad(a.id)) t.grad(a.id).data()[i] += common * y * y;
      if (t.wants_grad(b.id)) t.grad(b.id).data()[i] += common * x * x;
    }
  });
}

}  // namespace team::nn
