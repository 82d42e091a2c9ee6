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
#include <random>

#include "vcn/codec.hpp"
#include "vcn/metrics.hpp"
#include "vcn/selftest.hpp"

using vcn::Bitstream;
using vcn::GrayImage;
using vcn::QuantTable;
using vcn::Tensor;
namespace st = vcn::selftest;

namespace {

GrayImage smooth_image(std::int64_t w, std::int64_t h, std::uint64_t seed) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.samples.resize(static_cast<std::size_t>(w * h));
  std::mt19937_64 rng(seed);
  double fy = 0.5 + (rng() % 100) / 40.0, fx = 0.5 + (rng() % 100) / 40.0;
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x) {
      double v = 127 + 80 * std::sin(fy * y / 17.0) * std::cos(fx * x / 23.0) +
                 30.0 * x / w;
      img.at(y, x) = static_cast<std::uint8_t>(
          std::min(255.0, std::max(0.0, v)));
    }
  return img;
}

}  // namespace

TEST_CASE("dct of a constant block is DC-only with DC = 8c", "[codec]") {
  double block[64], coeffs[64];
  for (int i = 0; i < 64; ++i) block[i] = 37.5;
  vcn::dct8(block, coeffs);
  REQUIRE_THAT(coeffs[0], Catch::Matchers::WithinAbs(8 * 37.5, 1e-9));
  for (int i = 1; i < 64; ++i)
    REQUIRE_THAT(coeffs[i], Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("idct inverts dct and energy is conserved", "[codec]") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    double block[64], coeffs[64], back[64];
    std::uniform_real_distribution<double> d(-128, 127);
    for (int i = 0; i < 64; ++i) block[i] = d(rng);
    vcn::dct8(block, coeffs);
    vcn::idct8(coeffs, back);
    double e_in = 0, e_out = 0;
    for (int i = 0; i < 64; ++i) {
      REQUIRE_THAT(back[i], Catch::Matchers::WithinAbs(block[i], 1e-10));
      e_in += block[i] * block[i];
      e_out += coeffs[i] * coeffs[i];
    }
    REQUIRE_THAT(e_in, Catch::Matchers::WithinAbs(e_out, 1e-9));
  }
}

TEST_CASE("quality scaling of the quantization table", "[codec]") {
  QuantTable t50 = vcn::quant_table(50);
  const auto& base = vcn::base_luminance_table();
  for (int i = 0; i < 64; ++i) REQUIRE(t50[i] == base[i]);

  QuantTable t100 = vcn::quant_table(100);
  for (int i = 0; i < 64; ++i) REQUIRE(t100[i] == 1);

  QuantTable t2 = vcn::quant_table(2);
  QuantTable t60 = vcn::quant_table(60);
  for (int i = 0; i < 64; ++i) REQUIRE(t2[i] >= t60[i]);

  // elementwise non-increasing in QF across the whole range
  QuantTable prev = vcn::quant_table(1);
  for (int qf = 2; qf <= 100; ++qf) {
    QuantTable cur = vcn::quant_table(qf);
    for (int i = 0; i < 64; ++i) REQUIRE(cur[i] <= prev[i]);
    prev = cur;
  }
  REQUIRE_THROWS_AS(vcn::quant_table(0), vcn::Error);
  REQUIRE_THROWS_AS(vcn::quant_table(101), vcn::Error);
}

TEST_CASE("block codec: deterministic and idempotent on a fixed point",
          "[codec]") {
  GrayImage img = smooth_image(48, 32, 7);
  Bitstream b1 = vcn::encode_scic(img, 10);
  Bitstream b2 = vcn::encode_scic(img, 10);
  REQUIRE(b1.bytes == b2.bytes);

  // iterate decode(encode(.)) to a fixed point, then assert stability
  GrayImage cur = vcn::decode_scic(b1);
  bool fixed = false;
  for (int i = 0; i < 8 && !fixed; ++i) {
    GrayImage next = vcn::decode_scic(vcn::encode_scic(cur, 10));
    fixed = next.samples == cur.samples;
    cur = next;
  }
  REQUIRE(fixed);
  GrayImage again = vcn::decode_scic(vcn::encode_scic(cur, 10));
  REQUIRE(again.samples == cur.samples);
}

TEST_CASE("constant image decodes to a constant within the DC bound",
          "[codec]") {
  // DC-only path: the decoded image is constant and its offset is at
  // most half a DC table step spread over the 8x8 block (table[0]/16),
  // plus one for 8-bit rounding. That is <= 1 once table[0] <= 16
  // (QF >= 50); coarser tables legitimately shift farther.
  for (int qf : {2, 10, 50, 90}) {
    GrayImage img;
    img.width = 32;
    img.height = 24;
    img.samples.assign(32 * 24, 77);
    GrayImage dec = vcn::decode_scic(vcn::encode_scic(img, qf));
    for (std::size_t i = 1; i < dec.samples.size(); ++i)
      REQUIRE(dec.samples[i] == dec.samples[0]);
    double bound = vcn::quant_table(qf)[0] / 16.0 + 1.0;
    for (std::size_t i = 0; i < dec.samples.size(); ++i)
      REQUIRE(std::abs(int(dec.samples[i]) - 77) <= bound);
    if (qf >= 50)
      REQUIRE(std::abs(int(dec.samples[0]) - 77) <= 1);
  }
}

TEST_CASE("finer tables give lower distortion on the bundled corpus",
          "[codec]") {
  std::vector<GrayImage> images;
  std::vector<std::string> names;
  vcn::load_corpus("data/corpus", images, names);
  for (const GrayImage& img : images) {
    GrayImage d6 = vcn::decode_scic(vcn::encode_scic(img, 6));
    GrayImage d60 = vcn::decode_scic(vcn::encode_scic(img, 60));
    REQUIRE(vcn::mse(img, d60) <= vcn::mse(img, d6));
  }
}

TEST_CASE("codec rejects unaligned extents and corrupted streams",
          "[codec]") {
  GrayImage bad;
  bad.width = 30;
  bad.height = 32;
  bad.samples.assign(30 * 32, 0);
  REQUIRE_THROWS_WITH(vcn::encode_scic(bad, 10),
                      Catch::Matchers::ContainsSubstring("multiples of 8"));

  GrayImage img = smooth_image(32, 32, 9);
  Bitstream bs = vcn::encode_scic(img, 10);
  Bitstream corrupt = bs;
  corrupt.bytes[corrupt.bytes.size() / 2] ^= 0x10;
  REQUIRE_THROWS_AS(vcn::decode_scic(corrupt), vcn::Error);

  Bitstream truncated = bs;
  truncated.bytes.resize(truncated.bytes.size() - 9);
  REQUIRE_THROWS_AS(vcn::decode_scic(truncated), vcn::Error);
}

TEST_CASE("g(.) maps [0,1] tensors through the codec, shape-preserving",
          "[codec]") {
  std::mt19937_64 rng(11);
  Tensor<double> y = Tensor<double>::uniform({2, 1, 16, 16}, -0.2, 1.2, rng);
  std::size_t bytes = 0;
  Tensor<double> z = vcn::g_map(y, 50, vcn::kModeRaw, &bytes);
  REQUIRE(z.same_shape(y));
  REQUIRE(bytes > 0);
  for (std::int64_t i = 0; i < z.numel(); ++i) {
    REQUIRE(z[i] >= 0.0);
    REQUIRE(z[i] <= 1.0);
  }

  // near-lossless at QF=100: within 2/255 of the rounded input
  Tensor<double> y2 = Tensor<double>::uniform({1, 1, 16, 16}, 0, 1, rng);
  Tensor<double> z2 = vcn::g_map(y2, 100);
  for (std::int64_t i = 0; i < z2.numel(); ++i) {
    double rounded = std::lround(y2[i] * 255.0) / 255.0;
    REQUIRE(std::abs(z2[i] - rounded) <= 2.0 / 255.0 + 1e-12);
  }
}

TEST_CASE("feature-space bitstream roundtrips symbols and spec", "[codec]") {
  vcn::QuantizerSpec spec{64, -1.25, 2.5};
  std::mt19937_64 rng(13);
  Tensor<int> symbols({1, 4, 10, 10});
  for (std::int64_t i = 0; i < symbols.numel(); ++i)
    symbols[i] = static_cast<int>(rng() % 65);
  Bitstream bs = vcn::encode_dnnc(symbols, spec, 40, 40);
  vcn::BitstreamHeader h;
  Tensor<int> back = vcn::decode_dnnc(bs, &h);
  REQUIRE(back.shape() == symbols.shape());
  for (std::int64_t i = 0; i < back.numel(); ++i)
    REQUIRE(back[i] == symbols[i]);
  REQUIRE(h.qspec.beta == 64);
  REQUIRE(h.qspec.y_min == -1.25);
  REQUIRE(h.qspec.y_max == 2.5);
  REQUIRE(h.n_maps == 4);
}

TEST_CASE("all-zero symbol plane stays tiny", "[codec]") {
  vcn::QuantizerSpec spec{64, -1, 1};
  Tensor<int> symbols({1, 4, 40, 40});
  Bitstream bs = vcn::encode_dnnc(symbols, spec, 160, 160);
  INFO("bytes " << bs.size());
  REQUIRE(bs.size() <= 100);
}

TEST_CASE("every stream decodes to its declared extents or fails loudly",
          "[codec]") {
  GrayImage img = smooth_image(40, 24, 21);
  Bitstream bs = vcn::encode_scic(img, 30);
  vcn::BitstreamHeader h = vcn::parse_bitstream_header(bs);
  REQUIRE(h.height == 24);
  REQUIRE(h.width == 40);
  GrayImage dec = vcn::decode_scic(bs);
  REQUIRE(dec.width == h.width);
  REQUIRE(dec.height == h.height);

  Bitstream garbage;
  garbage.bytes.assign(64, 0x5A);
  REQUIRE_THROWS_AS(vcn::parse_bitstream_header(garbage), vcn::Error);
}

TEST_CASE("bpp arithmetic", "[codec]") {
  Bitstream bs;
  bs.bytes.assign(1000, 0);
  REQUIRE_THAT(vcn::bpp(bs, 160, 160),
               Catch::Matchers::WithinAbs(0.3125, 1e-12));
}
