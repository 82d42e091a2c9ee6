// Copyright 2026 The vcn Authors. All Rights Reserved.
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

#ifndef VCN_AUTOGRAD_HPP_
#define VCN_AUTOGRAD_HPP_

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "vcn/tensor.hpp"

namespace vcn {

// Handle into a Tape. Valid only for the tape that produced it.
struct Var {
  int id = -1;
};

// Reverse-mode tape. Nodes are recorded in execution order, so creation
// order is already topological; backward() is a single reverse sweep that
// visits each node exactly once.
template <typename T>
class Tape {
 public:
  Var leaf(const Tensor<T>& t, bool requires_grad) {
    return push(t, requires_grad, nullptr);
  }
  Var leaf(const Tensor<T>& t) { return leaf(t, t.requires_grad); }
  Var constant(const Tensor<T>& t) { return leaf(t, false); }

  Var push(Tensor<T> out, bool requires_grad,
           std::function<void(Tape&, Var)> backward) {
    nodes_.push_back(Node{std::move(out), requires_grad,
                          requires_grad ? std::move(backward) : nullptr});
    grads_.emplace_back();
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  const Tensor<T>& val(Var v) const { return nodes_[index(v)].out; }
  bool needs_grad(Var v) const { return nodes_[index(v)].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Accumulation buffer for a node, or nullptr when the node is untracked.
  Tensor<T>* grad_sink(Var v) {
    Node& n = nodes_[index(v)];
    if (!n.requires_grad) return nullptr;
    Tensor<T>& g = grads_[index(v)];
    if (g.empty()) g = Tensor<T>::zeros(n.out.shape());
    return &g;
  }

  void accum(Var v, const Tensor<T>& g) {
    if (Tensor<T>* sink = grad_sink(v)) {
      for (std::int64_t i = 0; i < g.numel(); ++i) (*sink)[i] += g[i];
    }
  }

  const Tensor<T>& upstream(Var v) const { return grads_[index(v)]; }

  // Gradient of the last backward() with respect to v; zeros if the loss
  // never touched it.
  Tensor<T> grad(Var v) const {
    const Tensor<T>& g = grads_[index(v)];
    return g.empty() ? Tensor<T>::zeros(nodes_[index(v)].out.shape()) : g;
  }

  void backward(Var loss) {
    check(val(loss).numel() == 1, "backward: loss must be scalar");
    if (Tensor<T>* sink = grad_sink(loss)) (*sink)[0] += T(1);
    for (int id = index(loss); id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (!n.requires_grad || !n.backward) continue;
      if (grads_[static_cast<std::size_t>(id)].empty()) continue;
      n.backward(*this, Var{id});
    }
  }

  // --- elementwise ops (identical shapes, or scalar-vs-tensor) ---

  Var add(Var a, Var b) {
    int ia = a.id, ib = b.id;
    Tensor<T> out =
        broadcast_apply(val(a), val(b), [](T x, T y) { return x + y; });
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [ia, ib](Tape& t, Var self) {
                  const Tensor<T>& g = t.upstream(self);
                  t.spread(Var{ia}, g, T(1));
                  t.spread(Var{ib}, g, T(1));
                });
  }

  Var sub(Var a, Var b) {
    int ia = a.id, ib = b.id;
    Tensor<T> out =
        broadcast_apply(val(a), val(b), [](T x, T y) { return x - y; });
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [ia, ib](Tape& t, Var self) {
                  const Tensor<T>& g = t.upstream(self);
                  t.spread(Var{ia}, g, T(1));
                  t.spread(Var{ib}, g, T(-1));
                });
  }

  Var mul(Var a, Var b) {
    int ia = a.id, ib = b.id;
    Tensor<T> out =
        broadcast_apply(val(a), val(b), [](T x, T y) { return x * y; });
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [ia, ib](Tape& t, Var self) {
                  const Tensor<T>& g = t.upstream(self);
                  const Tensor<T>& ta = t.val(Var{ia});
                  const Tensor<T>& tb = t.val(Var{ib});
                  t.spread_scaled(Var{ia}, g, tb);
                  t.spread_scaled(Var{ib}, g, ta);
                });
  }

  Var div(Var a, Var b) {
    int ia = a.id, ib = b.id;
    Tensor<T> out =
        broadcast_apply(val(a), val(b), [](T x, T y) { return x / y; });
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [ia, ib](Tape& t, Var self) {
                  const Tensor<T>& g = t.upstream(self);
                  const Tensor<T>& ta = t.val(Var{ia});
                  const Tensor<T>& tb = t.val(Var{ib});
                  std::int64_t n = g.numel();
                  auto aat = [&](std::int64_t i) {
                    return ta[ta.numel() == 1 ? 0 : i];
                  };
                  auto bat = [&](std::int64_t i) {
                    return tb[tb.numel() == 1 ? 0 : i];
                  };
                  if (Tensor<T>* sa = t.grad_sink(Var{ia})) {
                    bool scalar = sa->numel() == 1 && n > 1;
                    for (std::int64_t i = 0; i < n; ++i)
                      (*sa)[scalar ? 0 : i] += g[i] / bat(i);
                  }
                  if (Tensor<T>* sb = t.grad_sink(Var{ib})) {
                    bool scalar = sb->numel() == 1 && n > 1;
                    for (std::int64_t i = 0; i < n; ++i)
                      (*sb)[scalar ? 0 : i] -=
                          g[i] * aat(i) / (bat(i) * bat(i));
                  }
                });
  }

  // scale * x + shift, elementwise.
  Var affine(Var a, T scale, T shift) {
    int ia = a.id;
    Tensor<T> out = val(a);
    for (std::int64_t i = 0; i < out.numel(); ++i)
      out[i] = scale * out[i] + shift;
    return push(std::move(out), needs_grad(a), [ia, scale](Tape& t, Var self) {
      const Tensor<T>& g = t.upstream(self);
      if (Tensor<T>* sa = t.grad_sink(Var{ia}))
        for (std::int64_t i = 0; i < g.numel(); ++i) (*sa)[i] += scale * g[i];
    });
  }

  Var abs(Var a) {
    int ia = a.id;
    Tensor<T> out = val(a);
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = std::abs(out[i]);
    return push(std::move(out), needs_grad(a), [ia](Tape& t, Var self) {
      const Tensor<T>& g = t.upstream(self);
      const Tensor<T>& x = t.val(Var{ia});
      if (Tensor<T>* sa = t.grad_sink(Var{ia}))
        for (std::int64_t i = 0; i < g.numel(); ++i) {
          T s = x[i] > T(0) ? T(1) : (x[i] < T(0) ? T(-1) : T(0));
          (*sa)[i] += s * g[i];
        }
    });
  }

  Var relu(Var a) {
    int ia = a.id;
    Tensor<T> out = val(a);
    for (std::int64_t i = 0; i < out.numel(); ++i)
      out[i] = out[i] > T(0) ? out[i] : T(0);
    return push(std::move(out), needs_grad(a), [ia](Tape& t, Var self) {
      const Tensor<T>& g = t.upstream(self);
      const Tensor<T>& x = t.val(Var{ia});
      if (Tensor<T>* sa = t.grad_sink(Var{ia}))
        for (std::int64_t i = 0; i < g.numel(); ++i)
          if (x[i] > T(0)) (*sa)[i] += g[i];
    });
  }

  Var sum(Var a) {
    int ia = a.id;
    const Tensor<T>& x = val(a);
    T s = 0;
    for (std::int64_t i = 0; i < x.numel(); ++i) s += x[i];
    return push(Tensor<T>::scalar(s), needs_grad(a), [ia](Tape& t, Var self) {
      T g = t.upstream(self)[0];
      if (Tensor<T>* sa = t.grad_sink(Var{ia}))
        for (std::int64_t i = 0; i < sa->numel(); ++i) (*sa)[i] += g;
    });
  }

  Var mean(Var a) {
    int ia = a.id;
    const Tensor<T>& x = val(a);
    T s = 0;
    for (std::int64_t i = 0; i < x.numel(); ++i) s += x[i];
    T n = static_cast<T>(x.numel());
    return push(Tensor<T>::scalar(s / n), needs_grad(a),
                [ia, n](Tape& t, Var self) {
                  T g = t.upstream(self)[0] / n;
                  if (Tensor<T>* sa = t.grad_sink(Var{ia}))
                    for (std::int64_t i = 0; i < sa->numel(); ++i)
                      (*sa)[i] += g;
                });
  }

 private:
  struct Node {
    Tensor<T> out;
    bool requires_grad;
    std::function<void(Tape&, Var)> backward;
  };

  std::size_t index(Var v) const {
    check(v.id >= 0 && v.id < static_cast<int>(nodes_.size()),
          "tape: invalid var");
    return static_cast<std::size_t>(v.id);
  }

  template <typename F>
  static Tensor<T> broadcast_apply(const Tensor<T>& a, const Tensor<T>& b,
                                   F f) {
    if (a.same_shape(b)) {
      Tensor<T> out(a.shape());
      for (std::int64_t i = 0; i < a.numel(); ++i) out[i] = f(a[i], b[i]);
      return out;
    }
    if (b.numel() == 1) {
      Tensor<T> out(a.shape());
      for (std::int64_t i = 0; i < a.numel(); ++i) out[i] = f(a[i], b[0]);
      return out;
    }
    if (a.numel() == 1) {
      Tensor<T> out(b.shape());
      for (std::int64_t i = 0; i < b.numel(); ++i) out[i] = f(a[0], b[i]);
      return out;
    }
    fail("elementwise: shape mismatch " + a.shape_string() + " vs " +
         b.shape_string());
  }

  // g scaled by sgn into v, reducing to a scalar sink when v is scalar.
  void spread(Var v, const Tensor<T>& g, T sgn) {
    Tensor<T>* sink = grad_sink(v);
    if (!sink) return;
    bool scalar = sink->numel() == 1 && g.numel() > 1;
    for (std::int64_t i = 0; i < g.numel(); ++i)
      (*sink)[scalar ? 0 : i] += sgn * g[i];
  }

  // g * other into v (product-rule side), with scalar reduction.
  void spread_scaled(Var v, const Tensor<T>& g, const Tensor<T>& other) {
    Tensor<T>* sink = grad_sink(v);
    if (!sink) return;
    bool scalar = sink->numel() == 1 && g.numel() > 1;
    for (std::int64_t i = 0; i < g.numel(); ++i)
      (*sink)[scalar ? 0 : i] += g[i] * other[other.numel() == 1 ? 0 : i];
  }

  std::vector<Node> nodes_;
  std::vector<Tensor<T>> grads_;
};

}  // namespace vcn

#endif  // VCN_AUTOGRAD_HPP_
