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

#include <catch2/catch_amalgamated.hpp>

#include "vcn/losses.hpp"
#include "vcn/selftest.hpp"

using vcn::SsimParams;
using vcn::Tape;
using vcn::Tensor;
using vcn::Var;
namespace st = vcn::selftest;

TEST_CASE("l1 data loss basics and oracle", "[losses]") {
  auto a = st::random_tensor({1, 1, 8, 8}, 1);
  REQUIRE(vcn::l1_data(a, a) == 0.0);

  Tensor<double> b = a;
  for (std::int64_t i = 0; i < b.numel(); ++i) b[i] += 0.5;
  REQUIRE_THAT(vcn::l1_data(a, b), Catch::Matchers::WithinAbs(0.5, 1e-12));

  auto c = st::random_tensor({1, 1, 8, 8}, 2);
  REQUIRE_THAT(vcn::l1_data(a, c),
               Catch::Matchers::WithinAbs(st::l1_oracle(a, c), 1e-12));
  REQUIRE(vcn::l1_data(a, c) == vcn::l1_data(c, a));
}

TEST_CASE("gradient difference loss basics and oracle", "[losses]") {
  auto a = st::random_tensor({1, 1, 6, 6}, 3);
  REQUIRE(vcn::gradient_diff(a, a) == 0.0);

  auto c0 = Tensor<double>::full({1, 1, 6, 6}, 0.3);
  auto c1 = Tensor<double>::full({1, 1, 6, 6}, -1.8);
  REQUIRE(vcn::gradient_diff(c0, c1) == 0.0);

  auto b = st::random_tensor({1, 1, 6, 6}, 4);
  REQUIRE_THAT(vcn::gradient_diff(a, b),
               Catch::Matchers::WithinAbs(st::grad_diff_oracle(a, b), 1e-12));
  REQUIRE(vcn::gradient_diff(a, b) == vcn::gradient_diff(b, a));

  // translation insensitivity: constant offsets change nothing
  Tensor<double> a_off = a;
  for (std::int64_t i = 0; i < a.numel(); ++i) a_off[i] += 2.25;
  REQUIRE_THAT(vcn::gradient_diff(a_off, b),
               Catch::Matchers::WithinAbs(vcn::gradient_diff(a, b), 1e-12));
}

TEST_CASE("windowed statistics match the double-loop oracle", "[losses]") {
  auto a = st::random_tensor({1, 1, 16, 16}, 5, 0, 1);
  auto b = st::random_tensor({1, 1, 16, 16}, 6, 0, 1);

  auto cst = Tensor<double>::full({1, 1, 16, 16}, 0.42);
  Tensor<double> m = vcn::windowed_mean(cst);
  Tensor<double> v = vcn::windowed_variance(cst);
  for (std::int64_t i = 0; i < m.numel(); ++i) {
    REQUIRE_THAT(m[i], Catch::Matchers::WithinAbs(0.42, 1e-14));
    REQUIRE_THAT(v[i], Catch::Matchers::WithinAbs(0.0, 1e-14));
  }

  Tensor<double> va = vcn::windowed_variance(a);
  Tensor<double> cov_aa = vcn::windowed_covariance(a, a);
  REQUIRE(vcn::max_abs_diff(va, cov_aa) < 1e-12);

  Tensor<double> ma = vcn::windowed_mean(a);
  Tensor<double> cov = vcn::windowed_covariance(a, b);
  for (std::int64_t y = 0; y < 16; y += 3)
    for (std::int64_t x = 0; x < 16; x += 3) {
      st::WindowStats ws = st::window_stats_oracle(a, b, y, x);
      REQUIRE_THAT(ma.at(0, 0, y, x),
                   Catch::Matchers::WithinAbs(ws.mean_a, 1e-10));
      REQUIRE_THAT(va.at(0, 0, y, x),
                   Catch::Matchers::WithinAbs(ws.var_a, 1e-10));
      REQUIRE_THAT(cov.at(0, 0, y, x),
                   Catch::Matchers::WithinAbs(ws.cov, 1e-10));
    }
}

TEST_CASE("ssim of identical images is exactly one", "[losses]") {
  auto a = st::random_tensor({1, 1, 12, 12}, 7, 0, 1);
  Tensor<double> map = vcn::ssim_map(a, a);
  for (std::int64_t i = 0; i < map.numel(); ++i) REQUIRE(map[i] == 1.0);
  REQUIRE(vcn::dssim(a, a) == 0.0);
}

TEST_CASE("ssim of constants follows the closed form", "[losses]") {
  auto z = Tensor<double>::full({1, 1, 16, 16}, 0.0);
  auto o = Tensor<double>::full({1, 1, 16, 16}, 1.0);
  SsimParams p;
  // mu_a=0, mu_b=1, all second moments zero:
  // (c1 * c2) / ((1 + c1) * c2) = c1 / (1 + c1)
  double expected = p.c1 / (1 + p.c1);
  double via_oracle = st::ssim_pixel_oracle(z, o, 5, 5, p);
  REQUIRE_THAT(expected, Catch::Matchers::WithinRel(via_oracle, 1e-12));
  Tensor<double> map = vcn::ssim_map(z, o, p);
  for (std::int64_t i = 0; i < map.numel(); ++i)
    REQUIRE_THAT(map[i], Catch::Matchers::WithinRel(expected, 1e-12));
}

TEST_CASE("ssim map matches the per-pixel oracle on random input",
          "[losses]") {
  auto a = st::random_tensor({1, 1, 16, 16}, 8, 0, 1);
  auto b = st::random_tensor({1, 1, 16, 16}, 9, 0, 1);
  Tensor<double> map = vcn::ssim_map(a, b);
  for (std::int64_t y = 0; y < 16; ++y)
    for (std::int64_t x = 0; x < 16; ++x)
      REQUIRE_THAT(map.at(0, 0, y, x),
                   Catch::Matchers::WithinAbs(
                       st::ssim_pixel_oracle(a, b, y, x), 1e-10));
  for (std::int64_t i = 0; i < map.numel(); ++i)
    REQUIRE(map[i] <= 1.0 + 1e-12);
}

TEST_CASE("dssim is differentiable and passes finite differences",
          "[losses]") {
  auto a = st::random_tensor({1, 1, 8, 8}, 10, 0.1, 0.9);
  auto b = st::random_tensor({1, 1, 8, 8}, 11, 0.1, 0.9);
  a.requires_grad = true;
  auto f = [&](const Tensor<double>& xv) {
    Tape<double> t;
    return t.val(vcn::dssim(t, t.constant(xv), t.constant(b))).item();
  };
  Tape<double> t;
  Var va = t.leaf(a);
  t.backward(vcn::dssim(t, va, t.constant(b)));
  double worst = 0;
  bool ok = st::grad_close(t.grad(va), st::finite_diff(f, a), 1e-4, 1e-7,
                           &worst);
  INFO("worst " << worst);
  REQUIRE(ok);
}

TEST_CASE("upsample operator: identity at full, bilinear at low",
          "[losses]") {
  auto y = st::random_tensor({1, 1, 4, 4}, 12);
  Tensor<double> full = vcn::upsample_s(y, vcn::ResolutionMode::full);
  REQUIRE(vcn::max_abs_diff(full, y) == 0.0);

  auto c = Tensor<double>::full({1, 1, 3, 5}, 0.7);
  Tensor<double> up = vcn::upsample_s(c, vcn::ResolutionMode::low);
  REQUIRE(up.shape() == std::vector<std::int64_t>{1, 1, 6, 10});
  for (std::int64_t i = 0; i < up.numel(); ++i)
    REQUIRE_THAT(up[i], Catch::Matchers::WithinAbs(0.7, 1e-14));
}

TEST_CASE("bilinear x2 of the 2x2 checkerboard matches separable"
          " interpolation",
          "[losses]") {
  Tensor<double> cb({1, 1, 2, 2}, {0, 1, 1, 0});
  Tensor<double> up = vcn::upsample_s(cb, vcn::ResolutionMode::low);
  // 1-D half-pixel weights onto a 2-sample axis: rows sample source
  // positions -0.25, 0.25, 0.75, 1.25, clamped at the edges.
  double w0[4] = {1.0, 0.75, 0.25, 0.0};  // weight of sample 0
  for (std::int64_t y = 0; y < 4; ++y)
    for (std::int64_t x = 0; x < 4; ++x) {
      auto interp_row = [&](std::int64_t r) {
        return w0[x] * cb.at(0, 0, r, 0) + (1 - w0[x]) * cb.at(0, 0, r, 1);
      };
      double expected = w0[y] * interp_row(0) + (1 - w0[y]) * interp_row(1);
      REQUIRE_THAT(up.at(0, 0, y, x),
                   Catch::Matchers::WithinAbs(expected, 1e-14));
    }
}

TEST_CASE("composite objectives decompose into their terms", "[losses]") {
  auto x = st::random_tensor({1, 1, 16, 16}, 13, 0, 1);
  auto i_dec = st::random_tensor({1, 1, 16, 16}, 14, 0, 1);
  auto i_hat = st::random_tensor({1, 1, 16, 16}, 15, 0, 1);
  auto y = st::random_tensor({1, 1, 8, 8}, 16, 0, 1);

  // identical tensors zero every SCIC term
  {
    Tape<double> t;
    Var vx = t.constant(x);
    double idn = t.val(vcn::idn_objective(t, vcn::Framework::scic, vx, vx))
                     .item();
    double vcnl = t.val(vcn::vcn_objective(t, vcn::Framework::scic,
                                           vcn::ResolutionMode::low, vx, vx))
                      .item();
    REQUIRE(idn == 0.0);
    REQUIRE(vcnl == 0.0);
  }

  Tape<double> t;
  Var vx = t.constant(x), vd = t.constant(i_dec), vh = t.constant(i_hat),
      vy = t.constant(y);
  double idn =
      t.val(vcn::idn_objective(t, vcn::Framework::scic, vd, vx)).item();
  REQUIRE_THAT(idn, Catch::Matchers::WithinAbs(
                        vcn::l1_data(i_dec, x) + vcn::gradient_diff(i_dec, x),
                        1e-12));

  double vl = t.val(vcn::vcn_objective(t, vcn::Framework::scic,
                                       vcn::ResolutionMode::low, vh, vd))
                  .item();
  REQUIRE_THAT(vl, Catch::Matchers::WithinAbs(
                       vcn::l1_data(i_hat, i_dec) +
                           vcn::gradient_diff(i_hat, i_dec) +
                           vcn::dssim(i_hat, i_dec),
                       1e-12));

  double vf = t.val(vcn::vcn_objective(t, vcn::Framework::scic,
                                       vcn::ResolutionMode::full, vh, vd))
                  .item();
  REQUIRE_THAT(vf, Catch::Matchers::WithinAbs(
                       vcn::l1_data(i_hat, i_dec) +
                           vcn::gradient_diff(i_hat, i_dec),
                       1e-12));

  double rl = t.val(vcn::rsn_objective(t, vcn::Framework::scic,
                                       vcn::ResolutionMode::low, vh, vx, vy))
                  .item();
  Tensor<double> sy = vcn::upsample_s(y, vcn::ResolutionMode::low);
  REQUIRE_THAT(rl, Catch::Matchers::WithinAbs(
                       vcn::l1_data(i_hat, x) + vcn::gradient_diff(i_hat, x) +
                           vcn::dssim(sy, x),
                       1e-12));

  // the feature-space objective carries exactly the data terms
  double d_idn =
      t.val(vcn::idn_objective(t, vcn::Framework::dnnc, vd, vx)).item();
  REQUIRE_THAT(d_idn,
               Catch::Matchers::WithinAbs(vcn::l1_data(i_dec, x), 1e-12));
  double d_vcn = t.val(vcn::vcn_objective(t, vcn::Framework::dnnc,
                                          vcn::ResolutionMode::low, vh, vd))
                     .item();
  REQUIRE_THAT(d_vcn,
               Catch::Matchers::WithinAbs(vcn::l1_data(i_hat, i_dec), 1e-12));
  double d_rsn = t.val(vcn::rsn_objective(t, vcn::Framework::dnnc,
                                          vcn::ResolutionMode::low, vh, vx,
                                          vy))
                     .item();
  REQUIRE_THAT(d_rsn, Catch::Matchers::WithinAbs(vcn::l1_data(i_hat, x),
                                                 1e-12));
}

TEST_CASE("losses are non-negative on random input", "[losses]") {
  for (int s = 0; s < 5; ++s) {
    auto a = st::random_tensor({1, 1, 9, 9}, 100 + s, 0, 1);
    auto b = st::random_tensor({1, 1, 9, 9}, 200 + s, 0, 1);
    REQUIRE(vcn::l1_data(a, b) >= 0.0);
    REQUIRE(vcn::gradient_diff(a, b) >= 0.0);
    REQUIRE(vcn::dssim(a, b) >= 0.0);
  }
}
