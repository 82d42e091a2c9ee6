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

#ifndef VCN_IMAGE_OPS_HPP_
#define VCN_IMAGE_OPS_HPP_

#include <cmath>

#include "vcn/autograd.hpp"
#include "vcn/tensor.hpp"

namespace vcn {

namespace detail {

// Symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1, n+1 -> n-2.
inline std::int64_t reflect(std::int64_t i, std::int64_t n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

// Sliding-window offsets for an even window anchored center-right:
// win=8 covers [-3, +4] around the pixel.
inline int win_lo(int win) { return -(win / 2 - 1); }
inline int win_hi(int win) { return win / 2; }

template <typename T>
void box_filter_plane(const T* in, std::int64_t H, std::int64_t W, int win,
                      T* out) {
  const T inv = T(1) / static_cast<T>(win * win);
  for (std::int64_t y = 0; y < H; ++y) {
    for (std::int64_t x = 0; x < W; ++x) {
      T acc = 0;
      for (int dy = win_lo(win); dy <= win_hi(win); ++dy) {
        const T* row = in + reflect(y + dy, H) * W;
        for (int dx = win_lo(win); dx <= win_hi(win); ++dx)
          acc += row[reflect(x + dx, W)];
      }
      out[y * W + x] = acc * inv;
    }
  }
}

template <typename T>
void box_filter_plane_adjoint(const T* g, std::int64_t H, std::int64_t W,
                              int win, T* din) {
  const T inv = T(1) / static_cast<T>(win * win);
  for (std::int64_t y = 0; y < H; ++y) {
    for (std::int64_t x = 0; x < W; ++x) {
      T gv = g[y * W + x] * inv;
      for (int dy = win_lo(win); dy <= win_hi(win); ++dy) {
        T* row = din + reflect(y + dy, H) * W;
        for (int dx = win_lo(win); dx <= win_hi(win); ++dx)
          row[reflect(x + dx, W)] += gv;
      }
    }
  }
}

}  // namespace detail

// Windowed mean over a uniform win x win sliding window, stride 1,
// reflective borders. Input NCHW, per-plane.
template <typename T>
Tensor<T> windowed_mean(const Tensor<T>& a, int win = 8) {
  check(a.rank() == 4, "windowed_mean: expected NCHW input");
  std::int64_t H = a.dim(2), W = a.dim(3);
  check(H >= win / 2 + 1 && W >= win / 2 + 1,
        "windowed_mean: image smaller than half window");
  Tensor<T> out(a.shape());
  std::int64_t planes = a.dim(0) * a.dim(1);
  for (std::int64_t p = 0; p < planes; ++p)
    detail::box_filter_plane(a.data() + p * H * W, H, W, win,
                             out.data() + p * H * W);
  return out;
}

template <typename T>
Tensor<T> windowed_variance(const Tensor<T>& a, int win = 8) {
  Tensor<T> a2(a.shape());
  for (std::int64_t i = 0; i < a.numel(); ++i) a2[i] = a[i] * a[i];
  Tensor<T> m = windowed_mean(a, win);
  Tensor<T> m2 = windowed_mean(a2, win);
  Tensor<T> out(a.shape());
  for (std::int64_t i = 0; i < a.numel(); ++i) out[i] = m2[i] - m[i] * m[i];
  return out;
}

template <typename T>
Tensor<T> windowed_covariance(const Tensor<T>& a, const Tensor<T>& b,
                              int win = 8) {
  check(a.same_shape(b), "windowed_covariance: shape mismatch");
  Tensor<T> ab(a.shape());
  for (std::int64_t i = 0; i < a.numel(); ++i) ab[i] = a[i] * b[i];
  Tensor<T> ma = windowed_mean(a, win);
  Tensor<T> mb = windowed_mean(b, win);
  Tensor<T> mab = windowed_mean(ab, win);
  Tensor<T> out(a.shape());
  for (std::int64_t i = 0; i < a.numel(); ++i)
    out[i] = mab[i] - ma[i] * mb[i];
  return out;
}

// Differentiable windowed mean (box filter).
template <typename T>
Var box_filter(Tape<T>& t, Var a, int win = 8) {
  const Tensor<T>& ta = t.val(a);
  Tensor<T> out = windowed_mean(ta, win);
  int ia = a.id;
  std::int64_t H = ta.dim(2), W = ta.dim(3);
  std::int64_t planes = ta.dim(0) * ta.dim(1);
  return t.push(std::move(out), t.needs_grad(a),
                [ia, win, H, W, planes](Tape<T>& tp, Var self) {
                  const Tensor<T>& g = tp.upstream(self);
                  if (Tensor<T>* sa = tp.grad_sink(Var{ia}))
                    for (std::int64_t p = 0; p < planes; ++p)
                      detail::box_filter_plane_adjoint(
                          g.data() + p * H * W, H, W, win,
                          sa->data() + p * H * W);
                });
}

// Bilinear x2 upsampling, half-pixel centers (output pixel y samples the
// input at (y+0.5)/2 - 0.5, edges clamped).
template <typename T>
Var bilinear2x(Tape<T>& t, Var a) {
  const Tensor<T>& ta = t.val(a);
  check(ta.rank() == 4, "bilinear2x: expected NCHW input");
  std::int64_t B = ta.dim(0), C = ta.dim(1), H = ta.dim(2), W = ta.dim(3);
  std::int64_t Ho = 2 * H, Wo = 2 * W;
  Tensor<T> out({B, C, Ho, Wo});
  auto sample_axis = [](std::int64_t o, std::int64_t n, std::int64_t& i0,
                        std::int64_t& i1, T& w1) {
    double s = (static_cast<double>(o) + 0.5) / 2.0 - 0.5;
    double f = std::floor(s);
    w1 = static_cast<T>(s - f);
    std::int64_t i = static_cast<std::int64_t>(f);
    i0 = std::min(std::max(i, std::int64_t(0)), n - 1);
    i1 = std::min(std::max(i + 1, std::int64_t(0)), n - 1);
  };
  for (std::int64_t p = 0; p < B * C; ++p) {
    const T* in = ta.data() + p * H * W;
    T* o = out.data() + p * Ho * Wo;
    for (std::int64_t y = 0; y < Ho; ++y) {
      std::int64_t y0, y1;
      T wy;
      sample_axis(y, H, y0, y1, wy);
      for (std::int64_t x = 0; x < Wo; ++x) {
        std::int64_t x0, x1;
        T wx;
        sample_axis(x, W, x0, x1, wx);
        o[y * Wo + x] = (T(1) - wy) * ((T(1) - wx) * in[y0 * W + x0] +
                                       wx * in[y0 * W + x1]) +
                        wy * ((T(1) - wx) * in[y1 * W + x0] +
                              wx * in[y1 * W + x1]);
      }
    }
  }
  int ia = a.id;
  return t.push(std::move(out), t.needs_grad(a),
                [ia, B, C, H, W, Ho, Wo, sample_axis](Tape<T>& tp, Var self) {
                  const Tensor<T>& g = tp.upstream(self);
                  Tensor<T>* sa = tp.grad_sink(Var{ia});
                  if (!sa) return;
                  for (std::int64_t p = 0; p < B * C; ++p) {
                    const T* gi = g.data() + p * Ho * Wo;
                    T* di = sa->data() + p * H * W;
                    for (std::int64_t y = 0; y < Ho; ++y) {
                      std::int64_t y0, y1;
                      T wy;
                      sample_axis(y, H, y0, y1, wy);
                      for (std::int64_t x = 0; x < Wo; ++x) {
                        std::int64_t x0, x1;
                        T wx;
                        sample_axis(x, W, x0, x1, wx);
                        T gv = gi[y * Wo + x];
                        di[y0 * W + x0] += (T(1) - wy) * (T(1) - wx) * gv;
                        di[y0 * W + x1] += (T(1) - wy) * wx * gv;
                        di[y1 * W + x0] += wy * (T(1) - wx) * gv;
                        di[y1 * W + x1] += wy * wx * gv;
                      }
                    }
                  }
                });
}

// Mean absolute difference over all elements.
template <typename T>
Var l1_loss(Tape<T>& t, Var a, Var b) {
  const Tensor<T>& ta = t.val(a);
  const Tensor<T>& tb = t.val(b);
  check(ta.same_shape(tb), "l1: shape mismatch " + ta.shape_string() +
                               " vs " + tb.shape_string());
  std::int64_t n = ta.numel();
  T acc = 0;
  for (std::int64_t i = 0; i < n; ++i) acc += std::abs(ta[i] - tb[i]);
  int ia = a.id, ib = b.id;
  return t.push(Tensor<T>::scalar(acc / static_cast<T>(n)),
                t.needs_grad(a) || t.needs_grad(b),
                [ia, ib, n](Tape<T>& tp, Var self) {
                  T g = tp.upstream(self)[0] / static_cast<T>(n);
                  const Tensor<T>& ta2 = tp.val(Var{ia});
                  const Tensor<T>& tb2 = tp.val(Var{ib});
                  Tensor<T>* sa = tp.grad_sink(Var{ia});
                  Tensor<T>* sb = tp.grad_sink(Var{ib});
                  for (std::int64_t i = 0; i < n; ++i) {
                    T d = ta2[i] - tb2[i];
                    T s = d > T(0) ? g : (d < T(0) ? -g : T(0));
                    if (sa) (*sa)[i] += s;
                    if (sb) (*sb)[i] -= s;
                  }
                });
}

// Mean absolute difference of 8-neighbourhood pixel gradients,
// normalized by pixel count; out-of-image neighbours are skipped.
template <typename T>
Var grad_diff_loss(Tape<T>& t, Var a, Var b) {
  const Tensor<T>& ta = t.val(a);
  const Tensor<T>& tb = t.val(b);
  check(ta.same_shape(tb), "gradient_diff: shape mismatch " +
                               ta.shape_string() + " vs " +
                               tb.shape_string());
  check(ta.rank() == 4, "gradient_diff: expected NCHW input");
  std::int64_t planes = ta.dim(0) * ta.dim(1);
  std::int64_t H = ta.dim(2), W = ta.dim(3);
  const T norm = T(1) / static_cast<T>(planes * H * W);
  T acc = 0;
  for (std::int64_t p = 0; p < planes; ++p) {
    const T* pa = ta.data() + p * H * W;
    const T* pb = tb.data() + p * H * W;
    for (std::int64_t y = 0; y < H; ++y)
      for (std::int64_t x = 0; x < W; ++x)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            std::int64_t ny = y + dy, nx = x + dx;
            if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
            T d = (pa[y * W + x] - pa[ny * W + nx]) -
                  (pb[y * W + x] - pb[ny * W + nx]);
            acc += std::abs(d);
          }
  }
  int ia = a.id, ib = b.id;
  return t.push(Tensor<T>::scalar(acc * norm),
                t.needs_grad(a) || t.needs_grad(b),
                [ia, ib, planes, H, W, norm](Tape<T>& tp, Var self) {
                  T g = tp.upstream(self)[0] * norm;
                  const Tensor<T>& ta2 = tp.val(Var{ia});
                  const Tensor<T>& tb2 = tp.val(Var{ib});
                  Tensor<T>* sa = tp.grad_sink(Var{ia});
                  Tensor<T>* sb = tp.grad_sink(Var{ib});
                  if (!sa && !sb) return;
                  for (std::int64_t p = 0; p < planes; ++p) {
                    const T* pa = ta2.data() + p * H * W;
                    const T* pb = tb2.data() + p * H * W;
                    for (std::int64_t y = 0; y < H; ++y)
                      for (std::int64_t x = 0; x < W; ++x)
                        for (int dy = -1; dy <= 1; ++dy)
                          for (int dx = -1; dx <= 1; ++dx) {
                            if (dy == 0 && dx == 0) continue;
                            std::int64_t ny = y + dy, nx = x + dx;
                            if (ny < 0 || ny >= H || nx < 0 || nx >= W)
                              continue;
                            T d = (pa[y * W + x] - pa[ny * W + nx]) -
                                  (pb[y * W + x] - pb[ny * W + nx]);
                            T s = d > T(0) ? g : (d < T(0) ? -g : T(0));
                            if (sa) {
                              (*sa)[p * H * W + y * W + x] += s;
                              (*sa)[p * H * W + ny * W + nx] -= s;
                            }
                            if (sb) {
                              (*sb)[p * H * W + y * W + x] -= s;
                              (*sb)[p * H * W + ny * W + nx] += s;
                            }
                          }
                  }
                });
}

}  // namespace vcn

#endif  // VCN_IMAGE_OPS_HPP_
