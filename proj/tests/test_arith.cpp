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
#include <cmath>
#include <random>

#include "vcn/arith.hpp"

using vcn::ArithDecoder;
using vcn::ArithEncoder;
using vcn::SymbolModel;

namespace {

std::vector<int> random_stream(std::size_t n, int alphabet,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, alphabet - 1);
  std::vector<int> out(n);
  for (auto& s : out) s = d(rng);
  return out;
}

}  // namespace

TEST_CASE("roundtrip identity on random streams of several lengths",
          "[arith]") {
  for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(10000)}) {
    std::vector<int> in = random_stream(n, 65, 0xC0FFEE + n);
    auto bytes = vcn::arith_encode(in, 65);
    auto out = vcn::arith_decode(bytes, in.size(), 65);
    REQUIRE(out == in);
  }
}

TEST_CASE("exhaustive roundtrip over all short 3-symbol streams", "[arith]") {
  // every stream of length 0..4 over {0,1,2}
  for (int len = 0; len <= 4; ++len) {
    int total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    for (int v = 0; v < total; ++v) {
      std::vector<int> in;
      int x = v;
      for (int i = 0; i < len; ++i) {
        in.push_back(x % 3);
        x /= 3;
      }
      auto bytes = vcn::arith_encode(in, 3);
      REQUIRE(vcn::arith_decode(bytes, in.size(), 3) == in);
    }
  }
}

TEST_CASE("degenerate stream compresses to almost nothing", "[arith]") {
  std::vector<int> in(4096, 17);
  auto bytes = vcn::arith_encode(in, 65);
  INFO("bytes " << bytes.size());
  REQUIRE(bytes.size() <= 64);
  REQUIRE(vcn::arith_decode(bytes, in.size(), 65) == in);
}

TEST_CASE("iid uniform stream stays within 5% of the entropy bound",
          "[arith]") {
  std::size_t n = 10000;
  std::vector<int> in = random_stream(n, 65, 1234);
  auto bytes = vcn::arith_encode(in, 65);
  double bound_bytes = n * std::log2(65.0) / 8.0;
  INFO("bytes " << bytes.size() << " entropy bound " << bound_bytes);
  REQUIRE(static_cast<double>(bytes.size()) <= 1.05 * bound_bytes);
  REQUIRE(vcn::arith_decode(bytes, n, 65) == in);
}

TEST_CASE("skewed adaptive model beats the uniform rate", "[arith]") {
  std::mt19937_64 rng(5);
  std::discrete_distribution<int> d({80, 10, 5, 3, 2});
  std::vector<int> in(20000);
  for (auto& s : in) s = d(rng);
  auto bytes = vcn::arith_encode(in, 5);
  double uniform_bytes = in.size() * std::log2(5.0) / 8.0;
  REQUIRE(static_cast<double>(bytes.size()) < 0.6 * uniform_bytes);
  REQUIRE(vcn::arith_decode(bytes, in.size(), 5) == in);
}

TEST_CASE("raw bypass bits roundtrip alongside model symbols", "[arith]") {
  SymbolModel menc(7), mdec(7);
  ArithEncoder enc;
  std::mt19937_64 rng(6);
  std::vector<std::pair<int, std::uint32_t>> trace;
  for (int i = 0; i < 3000; ++i) {
    int sym = static_cast<int>(rng() % 7);
    std::uint32_t raw = static_cast<std::uint32_t>(rng() & 0x3FF);
    enc.encode(menc, sym);
    enc.encode_bits(raw, 10);
    trace.emplace_back(sym, raw);
  }
  auto bytes = enc.finish();
  ArithDecoder dec(bytes.data(), bytes.size());
  for (auto& [sym, raw] : trace) {
    REQUIRE(dec.decode(mdec) == sym);
    REQUIRE(dec.decode_bits(10) == raw);
  }
}

TEST_CASE("encoder and decoder models stay synchronized across halving",
          "[arith]") {
  // enough symbols to trigger the count ceiling several times
  std::vector<int> in = random_stream(200000, 4, 99);
  auto bytes = vcn::arith_encode(in, 4);
  REQUIRE(vcn::arith_decode(bytes, in.size(), 4) == in);
}

TEST_CASE("decoding with the wrong alphabet fails loudly or mismatches",
          "[arith]") {
  std::vector<int> in = random_stream(64, 5, 42);
  auto bytes = vcn::arith_encode(in, 5);
  bool differs = false;
  try {
    auto out = vcn::arith_decode(bytes, in.size(), 4);
    differs = out != in;
  } catch (const vcn::Error&) {
    differs = true;
  }
  REQUIRE(differs);
}
