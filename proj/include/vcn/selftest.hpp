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

// Independent verification suite: brute-force and finite-difference
// oracles for every numeric kernel, runnable via `vcn selftest` and
// reused by the test binaries. Oracle code here deliberately avoids the
// implementation paths it checks (direct loops, central differences,
// closed forms).

#ifndef VCN_SELFTEST_HPP_
#define VCN_SELFTEST_HPP_

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vcn/adam.hpp"
#include "vcn/autograd.hpp"
#include "vcn/conv.hpp"
#include "vcn/image_ops.hpp"
#include "vcn/losses.hpp"
#include "vcn/network.hpp"

namespace vcn::selftest {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// --- generic oracles ---

// Central finite differences of a scalar function at x.
template <typename F>
Tensor<double> finite_diff(F f, const Tensor<double>& x, double h = 1e-6) {
  Tensor<double> g(x.shape());
  Tensor<double> xp = x;
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    double v = x[i];
    xp[i] = v + h;
    double fp = f(xp);
    xp[i] = v - h;
    double fm = f(xp);
    xp[i] = v;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

// Relative agreement in the gradcheck sense: every element satisfies
// |a - n| <= atol + rtol * |n|.
inline bool grad_close(const Tensor<double>& analytic,
                       const Tensor<double>& numeric, double rtol = 1e-4,
                       double atol = 1e-7, double* worst = nullptr) {
  bool ok = true;
  double w = 0;
  for (std::int64_t i = 0; i < analytic.numel(); ++i) {
    double err = std::abs(analytic[i] - numeric[i]);
    double bound = atol + rtol * std::abs(numeric[i]);
    if (err > bound) ok = false;
    double ratio = err / std::max(atol, std::abs(numeric[i]) * rtol);
    w = std::max(w, ratio);
  }
  if (worst) *worst = w;
  return ok;
}

// Keeps entries at least `margin` away from zero (kinks of relu/abs/L1).
inline void push_off_kinks(Tensor<double>& x, double margin = 1e-3) {
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    if (std::abs(x[i]) < margin) x[i] = x[i] < 0 ? -margin : margin;
  }
}

inline Tensor<double> random_tensor(std::vector<std::int64_t> shape,
                                    std::uint64_t seed, double lo = -1,
                                    double hi = 1) {
  std::mt19937_64 rng(seed);
  return Tensor<double>::uniform(std::move(shape), lo, hi, rng);
}

// Double-loop windowed statistics with the same window convention as the
// implementation (even window anchored center-right, symmetric
// reflection) but computed directly per pixel.
struct WindowStats {
  double mean_a, mean_b, var_a, var_b, cov;
};

inline WindowStats window_stats_oracle(const Tensor<double>& a,
                                       const Tensor<double>& b,
                                       std::int64_t y, std::int64_t x,
                                       int win = 8) {
  std::int64_t H = a.dim(2), W = a.dim(3);
  auto refl = [](std::int64_t i, std::int64_t n) {
    if (i < 0) return -i - 1;
    if (i >= n) return 2 * n - 1 - i;
    return i;
  };
  WindowStats s{0, 0, 0, 0, 0};
  double n = win * win;
  for (int dy = -(win / 2 - 1); dy <= win / 2; ++dy)
    for (int dx = -(win / 2 - 1); dx <= win / 2; ++dx) {
      double av = a.at(0, 0, refl(y + dy, H), refl(x + dx, W));
      double bv = b.at(0, 0, refl(y + dy, H), refl(x + dx, W));
      s.mean_a += av / n;
      s.mean_b += bv / n;
    }
  for (int dy = -(win / 2 - 1); dy <= win / 2; ++dy)
    for (int dx = -(win / 2 - 1); dx <= win / 2; ++dx) {
      double av = a.at(0, 0, refl(y + dy, H), refl(x + dx, W));
      double bv = b.at(0, 0, refl(y + dy, H), refl(x + dx, W));
      s.var_a += (av - s.mean_a) * (av - s.mean_a) / n;
      s.var_b += (bv - s.mean_b) * (bv - s.mean_b) / n;
      s.cov += (av - s.mean_a) * (bv - s.mean_b) / n;
    }
  return s;
}

// Brute-force Eq.-style losses: plain double loops.
inline double l1_oracle(const Tensor<double>& a, const Tensor<double>& b) {
  double acc = 0;
  for (std::int64_t i = 0; i < a.numel(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.numel());
}

inline double grad_diff_oracle(const Tensor<double>& a,
                               const Tensor<double>& b) {
  std::int64_t H = a.dim(2), W = a.dim(3);
  double acc = 0;
  for (std::int64_t y = 0; y < H; ++y)
    for (std::int64_t x = 0; x < W; ++x)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dy && !dx) continue;
          std::int64_t ny = y + dy, nx = x + dx;
          if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
          double ga = a.at(0, 0, y, x) - a.at(0, 0, ny, nx);
          double gb = b.at(0, 0, y, x) - b.at(0, 0, ny, nx);
          acc += std::abs(ga - gb);
        }
  return acc / static_cast<double>(H * W);
}

inline double ssim_pixel_oracle(const Tensor<double>& a,
                                const Tensor<double>& b, std::int64_t y,
                                std::int64_t x, const SsimParams& p = {}) {
  WindowStats s = window_stats_oracle(a, b, y, x, p.window);
  double num = (2 * s.mean_a * s.mean_b + p.c1) * (2 * s.cov + p.c2);
  double den = (s.mean_a * s.mean_a + s.mean_b * s.mean_b + p.c1) *
               (s.var_a + s.var_b + p.c2);
  return num / den;
}

}  // namespace vcn::selftest

#include "vcn/selftest_checks.hpp"

#endif  // VCN_SELFTEST_HPP_
