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

#ifndef VCN_CONV_HPP_
#define VCN_CONV_HPP_

#include <Eigen/Dense>
#include <vector>

#include "vcn/autograd.hpp"
#include "vcn/tensor.hpp"

namespace vcn {

namespace detail {

// C(m,n) = op(A) * op(B), row-major, optionally accumulating.
template <typename T>
void gemm_rm(const T* A, const T* B, T* C, std::int64_t m, std::int64_t k,
             std::int64_t n, bool tA, bool tB, bool accumulate) {
  using Mat =
      Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> a(A, tA ? k : m, tA ? m : k);
  Eigen::Map<const Mat> b(B, tB ? n : k, tB ? k : n);
  Eigen::Map<Mat> c(C, m, n);
  if (!tA && !tB) {
    if (accumulate) c.noalias() += a * b;
    else c.noalias() = a * b;
  } else if (tA && !tB) {
    if (accumulate) c.noalias() += a.transpose() * b;
    else c.noalias() = a.transpose() * b;
  } else if (!tA && tB) {
    if (accumulate) c.noalias() += a * b.transpose();
    else c.noalias() = a * b.transpose();
  } else {
    if (accumulate) c.noalias() += a.transpose() * b.transpose();
    else c.noalias() = a.transpose() * b.transpose();
  }
}

// Unfold one (C,H,W) plane into a (C*k*k) x (Hg*Wg) patch matrix, where
// (Hg,Wg) is the sliding-window grid for the given stride/padding.
template <typename T>
void im2col(const T* img, std::int64_t C, std::int64_t H, std::int64_t W,
            int k, int stride, int pad, std::int64_t Hg, std::int64_t Wg,
            T* col) {
  const std::int64_t cols = Hg * Wg;
  for (std::int64_t c = 0; c < C; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = col + ((c * k + ky) * k + kx) * cols;
        for (std::int64_t gy = 0; gy < Hg; ++gy) {
          std::int64_t y = gy * stride - pad + ky;
          if (y < 0 || y >= H) {
            for (std::int64_t gx = 0; gx < Wg; ++gx) row[gy * Wg + gx] = T(0);
            continue;
          }
          const T* src = img + (c * H + y) * W;
          for (std::int64_t gx = 0; gx < Wg; ++gx) {
            std::int64_t x = gx * stride - pad + kx;
            row[gy * Wg + gx] = (x < 0 || x >= W) ? T(0) : src[x];
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-add a patch matrix back into a (C,H,W) plane.
template <typename T>
void col2im(const T* col, std::int64_t C, std::int64_t H, std::int64_t W,
            int k, int stride, int pad, std::int64_t Hg, std::int64_t Wg,
            T* img) {
  const std::int64_t cols = Hg * Wg;
  for (std::int64_t c = 0; c < C; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = col + ((c * k + ky) * k + kx) * cols;
        for (std::int64_t gy = 0; gy < Hg; ++gy) {
          std::int64_t y = gy * stride - pad + ky;
          if (y < 0 || y >= H) continue;
          T* dst = img + (c * H + y) * W;
          for (std::int64_t gx = 0; gx < Wg; ++gx) {
            std::int64_t x = gx * stride - pad + kx;
            if (x >= 0 && x < W) dst[x] += row[gy * Wg + gx];
          }
        }
      }
    }
  }
}

inline std::int64_t conv_out_extent(std::int64_t in, int k, int stride,
                                    int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

template <typename T>
void check_conv_shapes(const Tensor<T>& x, const Tensor<T>& w,
                       const Tensor<T>& b, const char* who) {
  check(x.rank() == 4, std::string(who) + ": input must be rank-4 NCHW, got " +
                           x.shape_string());
  check(w.rank() == 4 && w.dim(2) == w.dim(3),
        std::string(who) + ": weights must be rank-4 with square kernel, got " +
            w.shape_string());
  check(b.rank() == 1, std::string(who) + ": bias must be rank-1");
}

}  // namespace detail

struct ConvDims {
  std::int64_t batch, in_ch, H, W, out_ch;
  int k, stride, pad, outpad;
  std::int64_t Ho, Wo;
};

// x:(B,C,H,W)  w:(O,C,k,k)  b:(O)  ->  (B,O,Ho,Wo)
template <typename T>
Var conv2d(Tape<T>& t, Var x, Var w, Var b, int stride, int pad) {
  const Tensor<T>& tx = t.val(x);
  const Tensor<T>& tw = t.val(w);
  const Tensor<T>& tb = t.val(b);
  detail::check_conv_shapes(tx, tw, tb, "conv2d");
  check(stride >= 1 && pad >= 0, "conv2d: stride must be >=1 and pad >=0");
  check(tx.dim(1) == tw.dim(1),
        "conv2d: channel axis mismatch: input has " +
            std::to_string(tx.dim(1)) + " channels, weights expect " +
            std::to_string(tw.dim(1)));
  check(tb.dim(0) == tw.dim(0),
        "conv2d: bias axis mismatch: weights emit " +
            std::to_string(tw.dim(0)) + " channels, bias has " +
            std::to_string(tb.dim(0)));
  ConvDims d;
  d.batch = tx.dim(0);
  d.in_ch = tx.dim(1);
  d.H = tx.dim(2);
  d.W = tx.dim(3);
  d.out_ch = tw.dim(0);
  d.k = static_cast<int>(tw.dim(2));
  d.stride = stride;
  d.pad = pad;
  d.outpad = 0;
  check(d.H + 2 * pad >= d.k && d.W + 2 * pad >= d.k,
        "conv2d: spatial axis smaller than kernel");
  d.Ho = detail::conv_out_extent(d.H, d.k, stride, pad);
  d.Wo = detail::conv_out_extent(d.W, d.k, stride, pad);

  Tensor<T> out({d.batch, d.out_ch, d.Ho, d.Wo});
  const std::int64_t patch = d.in_ch * d.k * d.k;
  const std::int64_t sites = d.Ho * d.Wo;
  std::vector<T> col(static_cast<std::size_t>(patch * sites));
  for (std::int64_t n = 0; n < d.batch; ++n) {
    const T* xi = tx.data() + n * d.in_ch * d.H * d.W;
    detail::im2col(xi, d.in_ch, d.H, d.W, d.k, stride, pad, d.Ho, d.Wo,
                   col.data());
    T* oi = out.data() + n * d.out_ch * sites;
    detail::gemm_rm(tw.data(), col.data(), oi, d.out_ch, patch, sites, false,
                    false, false);
    for (std::int64_t o = 0; o < d.out_ch; ++o) {
      T bias = tb[o];
      for (std::int64_t s = 0; s < sites; ++s) oi[o * sites + s] += bias;
    }
  }

  int ix = x.id, iw = w.id, ib = b.id;
  bool rg = t.needs_grad(x) || t.needs_grad(w) || t.needs_grad(b);
  return t.push(std::move(out), rg, [ix, iw, ib, d](Tape<T>& tp, Var self) {
    const Tensor<T>& g = tp.upstream(self);
    const Tensor<T>& tx2 = tp.val(Var{ix});
    const Tensor<T>& tw2 = tp.val(Var{iw});
    Tensor<T>* sx = tp.grad_sink(Var{ix});
    Tensor<T>* sw = tp.grad_sink(Var{iw});
    Tensor<T>* sb = tp.grad_sink(Var{ib});
    const std::int64_t patch = d.in_ch * d.k * d.k;
    const std::int64_t sites = d.Ho * d.Wo;
    std::vector<T> col;
    if (sw) col.resize(static_cast<std::size_t>(patch * sites));
    std::vector<T> dcol;
    if (sx) dcol.resize(static_cast<std::size_t>(patch * sites));
    for (std::int64_t n = 0; n < d.batch; ++n) {
      const T* gi = g.data() + n * d.out_ch * sites;
      if (sb) {
        for (std::int64_t o = 0; o < d.out_ch; ++o) {
          T acc = 0;
          for (std::int64_t s = 0; s < sites; ++s) acc += gi[o * sites + s];
          (*sb)[o] += acc;
        }
      }
      if (sw) {
        const T* xi = tx2.data() + n * d.in_ch * d.H * d.W;
        detail::im2col(xi, d.in_ch, d.H, d.W, d.k, d.stride, d.pad, d.Ho, d.Wo,
                       col.data());
        detail::gemm_rm(gi, col.data(), sw->data(), d.out_ch, sites, patch,
                        false, true, true);
      }
      if (sx) {
        detail::gemm_rm(tw2.data(), gi, dcol.data(), patch, d.out_ch, sites,
                        true, false, false);
        detail::col2im(dcol.data(), d.in_ch, d.H, d.W, d.k, d.stride, d.pad,
                       d.Ho, d.Wo, sx->data() + n * d.in_ch * d.H * d.W);
      }
    }
  });
}

// x:(B,A,H,W)  w:(A,O,k,k)  b:(O)  ->  (B,O,Ho,Wo)
// with Ho = stride*(H-1) + k - 2*pad + output_padding.
// Adjoint of conv2d: <conv2d(u,w), v> == <u, conv2d_transpose(v,w)> for
// matched stride/padding and zero bias.
template <typename T>
Var conv2d_transpose(Tape<T>& t, Var x, Var w, Var b, int stride, int pad,
                     int output_padding = 0) {
  const Tensor<T>& tx = t.val(x);
  const Tensor<T>& tw = t.val(w);
  const Tensor<T>& tb = t.val(b);
  detail::check_conv_shapes(tx, tw, tb, "conv2d_transpose");
  check(stride == 1 || stride == 2, "conv2d_transpose: stride must be 1 or 2");
  check(output_padding >= 0 && output_padding < stride,
        "conv2d_transpose: output_padding must be in [0, stride)");
  check(tx.dim(1) == tw.dim(0),
        "conv2d_transpose: channel axis mismatch: input has " +
            std::to_string(tx.dim(1)) + " channels, weights expect " +
            std::to_string(tw.dim(0)));
  check(tb.dim(0) == tw.dim(1),
        "conv2d_transpose: bias axis mismatch: weights emit " +
            std::to_string(tw.dim(1)) + " channels, bias has " +
            std::to_string(tb.dim(0)));
  ConvDims d;
  d.batch = tx.dim(0);
  d.in_ch = tx.dim(1);   // A
  d.H = tx.dim(2);       // grid extent
  d.W = tx.dim(3);
  d.out_ch = tw.dim(1);  // O
  d.k = static_cast<int>(tw.dim(2));
  d.stride = stride;
  d.pad = pad;
  d.outpad = output_padding;
  d.Ho = static_cast<std::int64_t>(stride) * (d.H - 1) + d.k - 2 * pad +
         output_padding;
  d.Wo = static_cast<std::int64_t>(stride) * (d.W - 1) + d.k - 2 * pad +
         output_padding;
  check(d.Ho >= 1 && d.Wo >= 1, "conv2d_transpose: empty output");

  const std::int64_t patch = d.out_ch * d.k * d.k;
  const std::int64_t sites = d.H * d.W;
  Tensor<T> out({d.batch, d.out_ch, d.Ho, d.Wo});
  std::vector<T> col(static_cast<std::size_t>(patch * sites));
  for (std::int64_t n = 0; n < d.batch; ++n) {
    const T* xi = tx.data() + n * d.in_ch * sites;
    // (O*k*k, H*W) = w^T (O*k*k, A) * x (A, H*W)
    detail::gemm_rm(tw.data(), xi, col.data(), patch, d.in_ch, sites, true,
                    false, false);
    T* oi = out.data() + n * d.out_ch * d.Ho * d.Wo;
    detail::col2im(col.data(), d.out_ch, d.Ho, d.Wo, d.k, stride, pad, d.H,
                   d.W, oi);
    for (std::int64_t o = 0; o < d.out_ch; ++o) {
      T bias = tb[o];
      for (std::int64_t s = 0; s < d.Ho * d.Wo; ++s)
        oi[o * d.Ho * d.Wo + s] += bias;
    }
  }

  int ix = x.id, iw = w.id, ib = b.id;
  bool rg = t.needs_grad(x) || t.needs_grad(w) || t.needs_grad(b);
  return t.push(std::move(out), rg, [ix, iw, ib, d](Tape<T>& tp, Var self) {
    const Tensor<T>& g = tp.upstream(self);
    const Tensor<T>& tx2 = tp.val(Var{ix});
    const Tensor<T>& tw2 = tp.val(Var{iw});
    Tensor<T>* sx = tp.grad_sink(Var{ix});
    Tensor<T>* sw = tp.grad_sink(Var{iw});
    Tensor<T>* sb = tp.grad_sink(Var{ib});
    const std::int64_t patch = d.out_ch * d.k * d.k;
    const std::int64_t sites = d.H * d.W;
    const std::int64_t osites = d.Ho * d.Wo;
    std::vector<T> colg;
    if (sx || sw) colg.resize(static_cast<std::size_t>(patch * sites));
    for (std::int64_t n = 0; n < d.batch; ++n) {
      const T* gi = g.data() + n * d.out_ch * osites;
      if (sb) {
        for (std::int64_t o = 0; o < d.out_ch; ++o) {
          T acc = 0;
          for (std::int64_t s = 0; s < osites; ++s) acc += gi[o * osites + s];
          (*sb)[o] += acc;
        }
      }
      if (sx || sw) {
        detail::im2col(gi, d.out_ch, d.Ho, d.Wo, d.k, d.stride, d.pad, d.H,
                       d.W, colg.data());
        if (sx) {
          // (A, H*W) += w (A, O*k*k) * colg (O*k*k, H*W)
          detail::gemm_rm(tw2.data(), colg.data(),
                          sx->data() + n * d.in_ch * sites, d.in_ch, patch,
                          sites, false, false, true);
        }
        if (sw) {
          // (A, O*k*k) += x (A, H*W) * colg^T
          detail::gemm_rm(tx2.data() + n * d.in_ch * sites, colg.data(),
                          sw->data(), d.in_ch, sites, patch, false, true,
                          true);
        }
      }
    }
  });
}

// Plain forward-only wrappers used outside training loops.
template <typename T>
Tensor<T> conv2d_fwd(const Tensor<T>& x, const Tensor<T>& w,
                     const Tensor<T>& b, int stride, int pad) {
  Tape<T> t;
  return t.val(conv2d(t, t.constant(x), t.constant(w), t.constant(b), stride,
                      pad));
}

template <typename T>
Tensor<T> conv2d_transpose_fwd(const Tensor<T>& x, const Tensor<T>& w,
                               const Tensor<T>& b, int stride, int pad,
                               int output_padding = 0) {
  Tape<T> t;
  return t.val(conv2d_transpose(t, t.constant(x), t.constant(w),
                                t.constant(b), stride, pad, output_padding));
}

}  // namespace vcn

#endif  // VCN_CONV_HPP_
