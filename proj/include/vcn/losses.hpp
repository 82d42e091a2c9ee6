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

#ifndef VCN_LOSSES_HPP_
#define VCN_LOSSES_HPP_

#include "vcn/autograd.hpp"
#include "vcn/image_ops.hpp"

namespace vcn {

struct SsimParams {
  double c1 = 0.0001;
  double c2 = 0.0009;
  int window = 8;  // uniform sliding window, stride 1, reflective borders
};

// Per-term weights for the composite objectives; the objective itself is
// an unweighted sum, so everything defaults to 1.
struct LossWeights {
  double data = 1.0;
  double grad = 1.0;
  double dssim = 1.0;
};

// --- differentiable losses (tape) ---

template <typename T>
Var l1_data(Tape<T>& t, Var a, Var b) {
  return l1_loss(t, a, b);
}

template <typename T>
Var gradient_diff(Tape<T>& t, Var a, Var b) {
  return grad_diff_loss(t, a, b);
}

// Per-pixel SSIM from windowed statistics.
template <typename T>
Var ssim_map(Tape<T>& t, Var a, Var b, const SsimParams& p = {}) {
  check(t.val(a).same_shape(t.val(b)), "ssim: shape mismatch " +
                                           t.val(a).shape_string() + " vs " +
                                           t.val(b).shape_string());
  const T c1 = static_cast<T>(p.c1);
  const T c2 = static_cast<T>(p.c2);
  Var mu_a = box_filter(t, a, p.window);
  Var mu_b = box_filter(t, b, p.window);
  Var var_a = t.sub(box_filter(t, t.mul(a, a), p.window), t.mul(mu_a, mu_a));
  Var var_b = t.sub(box_filter(t, t.mul(b, b), p.window), t.mul(mu_b, mu_b));
  Var cov = t.sub(box_filter(t, t.mul(a, b), p.window), t.mul(mu_a, mu_b));
  Var num = t.mul(t.affine(t.mul(mu_a, mu_b), T(2), c1),
                  t.affine(cov, T(2), c2));
  Var den = t.mul(t.affine(t.add(t.mul(mu_a, mu_a), t.mul(mu_b, mu_b)), T(1),
                           c1),
                  t.affine(t.add(var_a, var_b), T(1), c2));
  return t.div(num, den);
}

// Structural dissimilarity: 1 - mean SSIM.
template <typename T>
Var dssim(Tape<T>& t, Var a, Var b, const SsimParams& p = {}) {
  return t.affine(t.mean(ssim_map(t, a, b, p)), T(-1), T(1));
}

// s(.): identity at full resolution, bilinear x2 at low resolution.
template <typename T>
Var upsample_s(Tape<T>& t, Var y, ResolutionMode mode) {
  return mode == ResolutionMode::full ? y : bilinear2x(t, y);
}

// --- plain-tensor wrappers (evaluation paths) ---

template <typename T>
T l1_data(const Tensor<T>& a, const Tensor<T>& b) {
  Tape<T> t;
  return t.val(l1_data(t, t.constant(a), t.constant(b))).item();
}

template <typename T>
T gradient_diff(const Tensor<T>& a, const Tensor<T>& b) {
  Tape<T> t;
  return t.val(gradient_diff(t, t.constant(a), t.constant(b))).item();
}

template <typename T>
Tensor<T> ssim_map(const Tensor<T>& a, const Tensor<T>& b,
                   const SsimParams& p = {}) {
  Tape<T> t;
  return t.val(ssim_map(t, t.constant(a), t.constant(b), p));
}

template <typename T>
T dssim(const Tensor<T>& a, const Tensor<T>& b, const SsimParams& p = {}) {
  Tape<T> t;
  return t.val(dssim(t, t.constant(a), t.constant(b), p)).item();
}

template <typename T>
Tensor<T> upsample_s(const Tensor<T>& y, ResolutionMode mode) {
  if (mode == ResolutionMode::full) return y;
  Tape<T> t;
  return t.val(bilinear2x(t, t.constant(y)));
}

// --- composite objectives ---

namespace detail {
template <typename T>
Var weighted_sum(Tape<T>& t, std::initializer_list<std::pair<Var, double>>
                                 terms) {
  Var total{-1};
  for (const auto& [v, w] : terms) {
    Var scaled = t.affine(v, static_cast<T>(w), T(0));
    total = total.id < 0 ? scaled : t.add(total, scaled);
  }
  return total;
}
}  // namespace detail

// IDN objective: data + gradient-difference terms against the ground
// truth (SCIC); data term only (DNNC).
template <typename T>
Var idn_objective(Tape<T>& t, Framework fw, Var decoded, Var x,
                  const LossWeights& w = {}) {
  if (fw == Framework::dnnc)
    return detail::weighted_sum(t, {{l1_data(t, decoded, x), w.data}});
  return detail::weighted_sum(t, {{l1_data(t, decoded, x), w.data},
                                  {gradient_diff(t, decoded, x), w.grad}});
}

// VCN objective: mimic the codec+IDN composite. Low-resolution SCIC adds
// a DSSIM term to sharpen the learned mapping.
template <typename T>
Var vcn_objective(Tape<T>& t, Framework fw, ResolutionMode mode, Var i_hat,
                  Var i_dec, const LossWeights& w = {},
                  const SsimParams& p = {}) {
  if (fw == Framework::dnnc)
    return detail::weighted_sum(t, {{l1_data(t, i_hat, i_dec), w.data}});
  if (mode == ResolutionMode::low)
    return detail::weighted_sum(
        t, {{l1_data(t, i_hat, i_dec), w.data},
            {gradient_diff(t, i_hat, i_dec), w.grad},
            {dssim(t, i_hat, i_dec, p), w.dssim}});
  return detail::weighted_sum(t, {{l1_data(t, i_hat, i_dec), w.data},
                                  {gradient_diff(t, i_hat, i_dec), w.grad}});
}

// RSN objective: the IDN-form loss evaluated through the virtual codec
// (i_hat = v(f(x))), plus the DSSIM regularizer keeping s(Y) close to X
// in the SCIC path.
template <typename T>
Var rsn_objective(Tape<T>& t, Framework fw, ResolutionMode mode, Var i_hat,
                  Var x, Var y, const LossWeights& w = {},
                  const SsimParams& p = {}) {
  if (fw == Framework::dnnc)
    return detail::weighted_sum(t, {{l1_data(t, i_hat, x), w.data}});
  Var sy = upsample_s(t, y, mode);
  return detail::weighted_sum(t, {{l1_data(t, i_hat, x), w.data},
                                  {gradient_diff(t, i_hat, x), w.grad},
                                  {dssim(t, sy, x, p), w.dssim}});
}

}  // namespace vcn

#endif  // VCN_LOSSES_HPP_
