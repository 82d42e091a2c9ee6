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

#include "vcn/quantizer.hpp"

using vcn::QuantizerSpec;
using vcn::Tensor;

TEST_CASE("range fitting takes the global min and max", "[quantizer]") {
  {
    Tensor<double> t({3}, {-2, 0, 3});
    QuantizerSpec s = vcn::fit_range<double>({t});
    REQUIRE(s.y_min == -2);
    REQUIRE(s.y_max == 3);
    REQUIRE(s.beta == 64);
  }
  {
    Tensor<double> a({2}, {-1, 1});
    Tensor<double> b({2}, {-3, 2});
    QuantizerSpec s = vcn::fit_range<double>({a, b});
    REQUIRE(s.y_min == -3);
    REQUIRE(s.y_max == 2);
  }
  REQUIRE_THROWS_AS(vcn::fit_range<double>({}), vcn::Error);
  Tensor<double> flat = Tensor<double>::full({4}, 1.5);
  REQUIRE_THROWS_WITH(vcn::fit_range<double>({flat}),
                      Catch::Matchers::ContainsSubstring("degenerate"));
}

TEST_CASE("a positive-only range warns but proceeds", "[quantizer]") {
  Tensor<double> t({2}, {0.5, 2.0});
  bool warned = false;
  QuantizerSpec s = vcn::fit_range<double>({t}, 64, &warned);
  REQUIRE(warned);
  REQUIRE(s.y_min == 0.5);

  Tensor<double> u({2}, {-1.0, 2.0});
  QuantizerSpec s2 = vcn::fit_range<double>({u}, 64, &warned);
  REQUIRE_FALSE(warned);
  REQUIRE(s2.y_max == 2.0);
}

TEST_CASE("endpoints and midpoint quantize to 0, beta, beta/2",
          "[quantizer]") {
  QuantizerSpec s{64, -1.5, 2.5};
  REQUIRE(vcn::quantize_value(s.y_min, s) == 0);
  REQUIRE(vcn::quantize_value(s.y_max, s) == 64);
  REQUIRE(vcn::quantize_value((s.y_min + s.y_max) / 2, s) == 32);
  REQUIRE(vcn::dequantize_value(0, s) == s.y_min);
  REQUIRE(vcn::dequantize_value(64, s) == s.y_max);
}

TEST_CASE("out-of-range values clamp, bad symbols are rejected",
          "[quantizer]") {
  QuantizerSpec s{64, -1.0, 1.0};
  REQUIRE(vcn::quantize_value(-7.0, s) == 0);
  REQUIRE(vcn::quantize_value(9.0, s) == 64);
  Tensor<int> bad({1}, {65});
  REQUIRE_THROWS_WITH(vcn::dequantize<double>(bad, s),
                      Catch::Matchers::ContainsSubstring("outside"));
}

TEST_CASE("dense scan: symbols match the closed-form formula",
          "[quantizer]") {
  QuantizerSpec s{64, -2.25, 1.75};
  for (int i = 0; i < 10000; ++i) {
    double y = s.y_min + (s.y_max - s.y_min) * i / 9999.0;
    int expected = static_cast<int>(
        std::lround(s.beta * (y - s.y_min) / (s.y_max - s.y_min)));
    if (expected > s.beta) expected = s.beta;
    REQUIRE(vcn::quantize_value(y, s) == expected);
  }
}

TEST_CASE("idempotence on the reconstruction lattice", "[quantizer]") {
  QuantizerSpec s{64, -1.0, 3.0};
  std::mt19937_64 rng(8);
  Tensor<double> y = Tensor<double>::uniform({1, 4, 10, 10}, -1.5, 3.5, rng);
  Tensor<double> z1 = vcn::quantize_dequantize(y, s);
  Tensor<double> z2 = vcn::quantize_dequantize(z1, s);
  REQUIRE(vcn::max_abs_diff(z1, z2) == 0.0);
  Tensor<int> s1 = vcn::quantize_symbols(y, s);
  Tensor<int> s2 = vcn::quantize_symbols(z1, s);
  for (std::int64_t i = 0; i < s1.numel(); ++i) REQUIRE(s1[i] == s2[i]);
}

TEST_CASE("reconstruction error is bounded by half a step in range",
          "[quantizer]") {
  QuantizerSpec s{64, -1.0, 1.0};
  double bound = (s.y_max - s.y_min) / (2.0 * s.beta);
  for (int i = 0; i <= 20000; ++i) {
    double y = s.y_min + (s.y_max - s.y_min) * i / 20000.0;
    double z = vcn::dequantize_value(vcn::quantize_value(y, s), s);
    REQUIRE(std::abs(z - y) <= bound + 1e-15);
  }
}

TEST_CASE("monotonicity and alphabet size", "[quantizer]") {
  QuantizerSpec s{64, -0.5, 0.5};
  int prev = 0;
  std::set<int> seen;
  for (int i = 0; i <= 5000; ++i) {
    double y = -0.8 + 1.6 * i / 5000.0;  // sweeps beyond both ends
    int sym = vcn::quantize_value(y, s);
    REQUIRE(sym >= prev);
    prev = sym;
    seen.insert(sym);
  }
  REQUIRE(seen.size() == 65);  // beta + 1 symbols
}

TEST_CASE("rounding is half away from zero at lattice ties", "[quantizer]") {
  // step = 1/64 of the range; y exactly between symbols 2 and 3 rounds up
  QuantizerSpec s{64, 0.0, 64.0};
  REQUIRE(vcn::quantize_value(2.5, s) == 3);
  REQUIRE(vcn::quantize_value(3.5, s) == 4);
}
