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

#include "vcn/autograd.hpp"
#include "vcn/image_ops.hpp"
#include "vcn/selftest.hpp"

using vcn::Tape;
using vcn::Tensor;
using vcn::Var;
namespace st = vcn::selftest;

TEST_CASE("relu forward and subgradient", "[autograd]") {
  Tape<double> t;
  Tensor<double> x({3}, {-1, 0, 2});
  x.requires_grad = true;
  Var vx = t.leaf(x);
  Var y = t.relu(vx);
  REQUIRE(t.val(y)[0] == 0);
  REQUIRE(t.val(y)[1] == 0);
  REQUIRE(t.val(y)[2] == 2);

  Tape<double> t2;
  Tensor<double> x2({2}, {-1, 2});
  x2.requires_grad = true;
  Var v2 = t2.leaf(x2);
  t2.backward(t2.sum(t2.relu(v2)));
  Tensor<double> g = t2.grad(v2);
  REQUIRE(g[0] == 0);
  REQUIRE(g[1] == 1);
}

TEST_CASE("backward of sum is ones, of half mean-square is residual/n",
          "[autograd]") {
  Tensor<double> x = st::random_tensor({2, 1, 3, 3}, 11);
  x.requires_grad = true;
  {
    Tape<double> t;
    Var vx = t.leaf(x);
    t.backward(t.sum(vx));
    Tensor<double> g = t.grad(vx);
    for (std::int64_t i = 0; i < g.numel(); ++i) REQUIRE(g[i] == 1.0);
  }
  {
    Tensor<double> target = st::random_tensor({2, 1, 3, 3}, 12);
    Tape<double> t;
    Var vx = t.leaf(x);
    Var d = t.sub(vx, t.constant(target));
    t.backward(t.affine(t.mean(t.mul(d, d)), 0.5, 0.0));
    Tensor<double> g = t.grad(vx);
    for (std::int64_t i = 0; i < g.numel(); ++i)
      REQUIRE_THAT(g[i], Catch::Matchers::WithinAbs(
                             (x[i] - target[i]) / double(x.numel()), 1e-14));
  }
}

TEST_CASE("non-scalar loss is rejected", "[autograd]") {
  Tape<double> t;
  Tensor<double> x({3}, {1, 2, 3});
  x.requires_grad = true;
  Var vx = t.leaf(x);
  REQUIRE_THROWS_AS(t.backward(vx), vcn::Error);
}

TEST_CASE("untouched parameters get zero gradients", "[autograd]") {
  Tape<double> t;
  Tensor<double> x({3}, {1, 2, 3});
  x.requires_grad = true;
  Var used = t.leaf(x);
  Var unused = t.leaf(x);
  t.backward(t.sum(used));
  Tensor<double> g = t.grad(unused);
  for (std::int64_t i = 0; i < 3; ++i) REQUIRE(g[i] == 0.0);
}

TEST_CASE("elementwise shape mismatch rejected", "[autograd]") {
  Tape<double> t;
  Var a = t.constant(Tensor<double>({2, 2}));
  Var b = t.constant(Tensor<double>({3}));
  REQUIRE_THROWS_AS(t.add(a, b), vcn::Error);
}

namespace {

// FD-checks d(sum(op(x) * u))/dx for a unary tape op.
template <typename BuildOp>
void check_unary_grad(BuildOp op, Tensor<double> x, std::uint64_t seed,
                      bool off_kinks = false) {
  if (off_kinks) st::push_off_kinks(x);
  x.requires_grad = true;

  Tape<double> probe;
  Var px = probe.constant(x);
  Tensor<double> u =
      st::random_tensor(probe.val(op(probe, px)).shape(), seed ^ 0xabc);

  auto f = [&](const Tensor<double>& xv) {
    Tape<double> t;
    Var v = op(t, t.constant(xv));
    return vcn::dot(t.val(v), u);
  };
  Tape<double> t;
  Var vx = t.leaf(x);
  Var y = op(t, vx);
  t.backward(t.sum(t.mul(y, t.constant(u))));
  Tensor<double> analytic = t.grad(vx);
  Tensor<double> numeric = st::finite_diff(f, x);
  double worst = 0;
  bool ok = st::grad_close(analytic, numeric, 1e-4, 1e-7, &worst);
  INFO("worst violation ratio " << worst);
  REQUIRE(ok);
}

}  // namespace

TEST_CASE("finite differences validate every elementwise op", "[autograd]") {
  auto x = st::random_tensor({1, 1, 4, 4}, 21);
  auto y = st::random_tensor({1, 1, 4, 4}, 22, 0.5, 1.5);  // away from 0

  check_unary_grad([](Tape<double>& t, Var v) { return t.relu(v); }, x, 1,
                   true);
  check_unary_grad([](Tape<double>& t, Var v) { return t.abs(v); }, x, 2,
                   true);
  check_unary_grad(
      [](Tape<double>& t, Var v) { return t.affine(v, -2.5, 0.75); }, x, 3);
  check_unary_grad([](Tape<double>& t, Var v) { return t.mean(v); }, x, 4);
  check_unary_grad([](Tape<double>& t, Var v) { return t.sum(v); }, x, 5);
  check_unary_grad(
      [&](Tape<double>& t, Var v) { return t.add(v, t.constant(y)); }, x, 6);
  check_unary_grad(
      [&](Tape<double>& t, Var v) { return t.sub(t.constant(y), v); }, x, 7);
  check_unary_grad(
      [&](Tape<double>& t, Var v) { return t.mul(v, t.constant(y)); }, x, 8);
  check_unary_grad(
      [&](Tape<double>& t, Var v) { return t.div(v, t.constant(y)); }, x, 9);
  check_unary_grad(
      [&](Tape<double>& t, Var v) { return t.div(t.constant(y), v); }, y, 10);
  check_unary_grad(
      [&](Tape<double>& t, Var v) {
        return t.mul(v, t.constant(Tensor<double>::scalar(3.25)));
      },
      x, 11);
  check_unary_grad([](Tape<double>& t, Var v) { return vcn::box_filter(t, v); },
                   st::random_tensor({1, 1, 6, 6}, 23), 12);
  check_unary_grad(
      [](Tape<double>& t, Var v) { return vcn::bilinear2x(t, v); },
      st::random_tensor({1, 2, 5, 4}, 24), 13);
}

TEST_CASE("finite differences validate both loss kernels", "[autograd]") {
  auto a = st::random_tensor({1, 1, 5, 5}, 31);
  auto b = st::random_tensor({1, 1, 5, 5}, 32);
  // keep |a-b| and the pairwise gradient differences off the kinks
  for (std::int64_t i = 0; i < a.numel(); ++i) a[i] = 2 * a[i] + 3.7 * b[i];

  check_unary_grad(
      [&](Tape<double>& t, Var v) { return vcn::l1_loss(t, v, t.constant(b)); },
      a, 41);
  check_unary_grad(
      [&](Tape<double>& t, Var v) {
        return vcn::grad_diff_loss(t, v, t.constant(b));
      },
      a, 42);
  check_unary_grad(
      [&](Tape<double>& t, Var v) {
        return vcn::grad_diff_loss(t, t.constant(b), v);
      },
      a, 43);
}

TEST_CASE("forward results are deterministic", "[autograd]") {
  auto x = st::random_tensor({1, 1, 8, 8}, 77);
  auto run = [&] {
    Tape<double> t;
    Var v = t.constant(x);
    Var y = vcn::box_filter(t, t.relu(t.affine(v, 1.7, -0.2)));
    return t.val(y);
  };
  Tensor<double> r1 = run(), r2 = run();
  for (std::int64_t i = 0; i < r1.numel(); ++i) REQUIRE(r1[i] == r2[i]);
}
