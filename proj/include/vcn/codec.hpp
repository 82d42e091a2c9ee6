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

#ifndef VCN_CODEC_HPP_
#define VCN_CODEC_HPP_

#include <array>
#include <cmath>
#include <vector>

#include "vcn/arith.hpp"
#include "vcn/byteio.hpp"
#include "vcn/image.hpp"
#include "vcn/quantizer.hpp"

namespace vcn {

// --- 8x8 orthonormal DCT-II ---

namespace detail {

struct DctBasis {
  double c[8][8];
  DctBasis() {
    const double pi = 3.14159265358979323846;
    for (int u = 0; u < 8; ++u) {
      double a = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x)
        c[u][x] = a * std::cos((2 * x + 1) * u * pi / 16.0);
    }
  }
};

inline const DctBasis& dct_basis() {
  static const DctBasis basis;
  return basis;
}

}  // namespace detail

// F = C * f * C^T
inline void dct8(const double block[64], double coeffs[64]) {
  const auto& C = detail::dct_basis().c;
  double tmp[64];
  for (int u = 0; u < 8; ++u)
    for (int x = 0; x < 8; ++x) {
      double acc = 0;
      for (int y = 0; y < 8; ++y) acc += C[u][y] * block[y * 8 + x];
      tmp[u * 8 + x] = acc;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double acc = 0;
      for (int x = 0; x < 8; ++x) acc += tmp[u * 8 + x] * C[v][x];
      coeffs[u * 8 + v] = acc;
    }
}

// f = C^T * F * C
inline void idct8(const double coeffs[64], double block[64]) {
  const auto& C = detail::dct_basis().c;
  double tmp[64];
  for (int y = 0; y < 8; ++y)
    for (int v = 0; v < 8; ++v) {
      double acc = 0;
      for (int u = 0; u < 8; ++u) acc += C[u][y] * coeffs[u * 8 + v];
      tmp[y * 8 + v] = acc;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double acc = 0;
      for (int v = 0; v < 8; ++v) acc += tmp[y * 8 + v] * C[v][x];
      block[y * 8 + x] = acc;
    }
}

// --- quantization tables ---

// Standard luminance base table (raster order).
inline const std::array<int, 64>& base_luminance_table() {
  static const std::array<int, 64> base = {
      16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
      14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
      18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
      49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
  return base;
}

using QuantTable = std::array<int, 64>;

// Quality-factor scaling: scale = 5000/QF below 50, else 200 - 2*QF;
// entries clamp to [1, 255].
inline QuantTable quant_table(int qf) {
  check(qf >= 1 && qf <= 100, "quant_table: QF must be in [1, 100], got " +
                                  std::to_string(qf));
  double scale = qf < 50 ? 5000.0 / qf : 200.0 - 2.0 * qf;
  QuantTable t;
  const auto& base = base_luminance_table();
  for (int i = 0; i < 64; ++i) {
    long v = std::lround(base[static_cast<std::size_t>(i)] * scale / 100.0);
    t[static_cast<std::size_t>(i)] = static_cast<int>(v < 1 ? 1 : (v > 255 ? 255 : v));
  }
  return t;
}

// Zigzag scan: zigzag_order()[i] is the raster index of the i-th
// zigzag-ordered coefficient.
inline const std::array<int, 64>& zigzag_order() {
  static const std::array<int, 64> zz = {
      0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
      12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
      35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
      58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};
  return zz;
}

// --- bitstream container ---

struct Bitstream {
  std::vector<std::uint8_t> bytes;
  std::size_t size() const { return bytes.size(); }
};

inline constexpr int kModeFull = 0;
inline constexpr int kModeLow = 1;
inline constexpr int kModeRaw = 2;  // plain codec, no re-sampling network

struct BitstreamHeader {
  Framework path = Framework::scic;
  int mode = kModeRaw;
  int qf = 0;
  std::int64_t height = 0, width = 0;  // original image extents
  int n_maps = 0;                      // feature-map count (DNNC)
  QuantizerSpec qspec;                 // DNNC
  std::size_t header_bytes = 0;
};

namespace detail {

inline std::string bitstream_header_bytes(const BitstreamHeader& h) {
  std::string s = "VCNBITS1";
  s.push_back(h.path == Framework::scic ? 0 : 1);
  s.push_back(static_cast<char>(h.mode));
  s.push_back(static_cast<char>(h.qf));
  s.push_back(0);
  put_u32(s, static_cast<std::uint32_t>(h.height));
  put_u32(s, static_cast<std::uint32_t>(h.width));
  if (h.path == Framework::dnnc) {
    put_u32(s, static_cast<std::uint32_t>(h.n_maps));
    put_u32(s, static_cast<std::uint32_t>(h.qspec.beta));
    put_f64(s, h.qspec.y_min);
    put_f64(s, h.qspec.y_max);
  }
  return s;
}

inline Bitstream seal_bitstream(const BitstreamHeader& h,
                                const std::vector<std::uint8_t>& payload) {
  std::string s = bitstream_header_bytes(h);
  s.append(reinterpret_cast<const char*>(payload.data()), payload.size());
  put_u32(s, crc32(s.data(), s.size()));
  Bitstream out;
  out.bytes.assign(s.begin(), s.end());
  return out;
}

}  // namespace detail

// Validates magic and CRC, returns the parsed header.
inline BitstreamHeader parse_bitstream_header(const Bitstream& bs) {
  check(bs.bytes.size() >= 24, "bitstream: too small");
  check(std::memcmp(bs.bytes.data(), "VCNBITS1", 8) == 0,
        "bitstream: bad magic");
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i)
    stored |= std::uint32_t(bs.bytes[bs.bytes.size() - 4 + i]) << (8 * i);
  check(crc32(bs.bytes.data(), bs.bytes.size() - 4) == stored,
        "bitstream: CRC mismatch");
  detail::ByteReader r(bs.bytes.data() + 8, bs.bytes.size() - 8);
  BitstreamHeader h;
  std::uint8_t path = r.u8();
  check(path <= 1, "bitstream: unknown path tag");
  h.path = path == 0 ? Framework::scic : Framework::dnnc;
  h.mode = r.u8();
  check(h.mode <= kModeRaw, "bitstream: unknown mode");
  h.qf = r.u8();
  r.u8();  // reserved
  h.height = r.u32();
  h.width = r.u32();
  check(h.height > 0 && h.width > 0, "bitstream: empty extents");
  if (h.path == Framework::dnnc) {
    h.n_maps = static_cast<int>(r.u32());
    h.qspec.beta = static_cast<int>(r.u32());
    h.qspec.y_min = r.f64();
    h.qspec.y_max = r.f64();
    check(h.n_maps >= 1, "bitstream: bad feature-map count");
    check(h.qspec.beta >= 1 && h.qspec.y_min < h.qspec.y_max,
          "bitstream: bad quantizer spec");
  }
  h.header_bytes = 8 + r.pos();
  return h;
}

// --- SCIC block codec ---

namespace detail {

// Level coding shared by DC and AC: capped-unary magnitude class over
// per-position binary models, raw refinement bits, raw sign.
inline constexpr int kMaxMagClass = 16;

struct LevelModels {
  std::vector<SymbolModel> unary;  // binary model per unary position
  LevelModels() : unary(kMaxMagClass, SymbolModel(2)) {}
};

inline void encode_level(ArithEncoder& enc, LevelModels& m, int value) {
  std::uint32_t mag = static_cast<std::uint32_t>(value < 0 ? -value : value);
  int cls = 0;
  while ((1u << cls) <= mag) ++cls;  // cls = bit length of mag
  check(cls < kMaxMagClass, "codec: level magnitude out of range");
  for (int i = 0; i < cls; ++i) enc.encode(m.unary[static_cast<std::size_t>(i)], 1);
  check(cls < kMaxMagClass, "codec: unary cap");
  enc.encode(m.unary[static_cast<std::size_t>(cls)], 0);
  if (cls > 0) {
    if (cls > 1) enc.encode_bits(mag - (1u << (cls - 1)), cls - 1);
    enc.encode_raw_bit(value < 0 ? 1 : 0);
  }
}

inline int decode_level(ArithDecoder& dec, LevelModels& m) {
  int cls = 0;
  while (dec.decode(m.unary[static_cast<std::size_t>(cls)]) == 1) {
    ++cls;
    check(cls < kMaxMagClass, "codec: unary run exceeds cap (model desync)");
  }
  if (cls == 0) return 0;
  std::uint32_t mag = 1u << (cls - 1);
  if (cls > 1) mag |= dec.decode_bits(cls - 1);
  return dec.decode_raw_bit() ? -static_cast<int>(mag)
                              : static_cast<int>(mag);
}

// AC control alphabet: 0..14 = run of zeros before the next level,
// 15 = fifteen zeros with no level (ZRL), 16 = end of block.
inline constexpr int kZrl = 15;
inline constexpr int kEob = 16;

inline std::int64_t scic_coded_extent(std::int64_t image_extent, int mode) {
  return mode == kModeLow ? image_extent / 2 : image_extent;
}

}  // namespace detail

// Forward block pass: level shift, DCT, divide-by-table rounding, zigzag,
// differential DC, adaptive arithmetic coding of the symbol streams.
inline Bitstream encode_scic(const GrayImage& img, int qf,
                             int mode = kModeRaw, std::int64_t orig_h = 0,
                             std::int64_t orig_w = 0) {
  check(img.width % 8 == 0 && img.height % 8 == 0,
        "encode_scic: extents must be multiples of 8, got " +
            std::to_string(img.width) + "x" + std::to_string(img.height));
  QuantTable table = quant_table(qf);
  const auto& zz = zigzag_order();

  BitstreamHeader h;
  h.path = Framework::scic;
  h.mode = mode;
  h.qf = qf;
  h.height = orig_h > 0 ? orig_h : img.height;
  h.width = orig_w > 0 ? orig_w : img.width;
  check(detail::scic_coded_extent(h.height, mode) == img.height &&
            detail::scic_coded_extent(h.width, mode) == img.width,
        "encode_scic: coded extents inconsistent with declared mode");

  ArithEncoder enc;
  detail::LevelModels dc_models, ac_models;
  SymbolModel ac_control(17);
  int prev_dc = 0;
  double block[64], coeffs[64];
  for (std::int64_t by = 0; by < img.height; by += 8) {
    for (std::int64_t bx = 0; bx < img.width; bx += 8) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          block[y * 8 + x] =
              static_cast<double>(img.at(by + y, bx + x)) - 128.0;
      dct8(block, coeffs);
      int q[64];
      for (int i = 0; i < 64; ++i)
        q[i] = static_cast<int>(
            std::lround(coeffs[zz[static_cast<std::size_t>(i)]] /
                        table[static_cast<std::size_t>(zz[static_cast<std::size_t>(i)])]));
      detail::encode_level(enc, dc_models, q[0] - prev_dc);
      prev_dc = q[0];
      int pos = 1;
      while (pos < 64) {
        int run = 0;
        while (pos + run < 64 && q[pos + run] == 0) ++run;
        if (pos + run == 64) {
          enc.encode(ac_control, detail::kEob);
          break;
        }
        while (run >= 15) {
          enc.encode(ac_control, detail::kZrl);
          run -= 15;
          pos += 15;
        }
        enc.encode(ac_control, run);
        pos += run;
        detail::encode_level(enc, ac_models, q[pos]);
        ++pos;
      }
    }
  }
  return detail::seal_bitstream(h, enc.finish());
}

inline GrayImage decode_scic(const Bitstream& bs,
                             BitstreamHeader* header = nullptr) {
  BitstreamHeader h = parse_bitstream_header(bs);
  check(h.path == Framework::scic, "decode_scic: not a SCIC stream");
  if (header) *header = h;
  GrayImage img;
  img.height = detail::scic_coded_extent(h.height, h.mode);
  img.width = detail::scic_coded_extent(h.width, h.mode);
  check(img.width % 8 == 0 && img.height % 8 == 0,
        "decode_scic: coded extents not block-aligned");
  img.samples.resize(static_cast<std::size_t>(img.width * img.height));

  QuantTable table = quant_table(h.qf);
  const auto& zz = zigzag_order();
  ArithDecoder dec(bs.bytes.data() + h.header_bytes,
                   bs.bytes.size() - h.header_bytes - 4);
  detail::LevelModels dc_models, ac_models;
  SymbolModel ac_control(17);
  int prev_dc = 0;
  double block[64], coeffs[64];
  for (std::int64_t by = 0; by < img.height; by += 8) {
    for (std::int64_t bx = 0; bx < img.width; bx += 8) {
      int q[64] = {0};
      prev_dc += detail::decode_level(dec, dc_models);
      q[0] = prev_dc;
      int pos = 1;
      while (pos < 64) {
        int sym = dec.decode(ac_control);
        if (sym == detail::kEob) break;
        if (sym == detail::kZrl) {
          pos += 15;
          check(pos <= 64, "decode_scic: zero run overflows block");
          continue;
        }
        pos += sym;
        check(pos < 64, "decode_scic: coefficient run overflows block");
        q[pos] = detail::decode_level(dec, ac_models);
        ++pos;
      }
      for (int i = 0; i < 64; ++i)
        coeffs[zz[static_cast<std::size_t>(i)]] =
            static_cast<double>(q[i]) *
            table[static_cast<std::size_t>(zz[static_cast<std::size_t>(i)])];
      idct8(coeffs, block);
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          long v = std::lround(block[y * 8 + x] + 128.0);
          img.at(by + y, bx + x) =
              static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
        }
    }
  }
  return img;
}

// g(.): the full lossy channel on a [0,1] tensor. Clamps, scales to
// 8 bits, runs the block codec, and rescales. Non-differentiable by
// construction: plain tensors in, plain tensors out.
template <typename T>
Tensor<T> g_map(const Tensor<T>& y, int qf, int mode = kModeRaw,
                std::size_t* stream_bytes = nullptr) {
  check(y.rank() == 4 && y.dim(1) == 1, "g_map: expected (B,1,H,W)");
  Tensor<T> out(y.shape());
  std::size_t total = 0;
  for (std::int64_t n = 0; n < y.dim(0); ++n) {
    Tensor<T> plane({1, 1, y.dim(2), y.dim(3)});
    for (std::int64_t i = 0; i < plane.numel(); ++i) {
      T v = y[n * plane.numel() + i];
      plane[i] = v < T(0) ? T(0) : (v > T(1) ? T(1) : v);
    }
    GrayImage img8 = tensor_to_image(plane);
    Bitstream bs = encode_scic(img8, qf, kModeRaw);
    total += bs.size();
    GrayImage dec = decode_scic(bs);
    Tensor<T> back = image_to_tensor<T>(dec);
    for (std::int64_t i = 0; i < plane.numel(); ++i)
      out[n * plane.numel() + i] = back[i];
  }
  if (stream_bytes) *stream_bytes = total;
  return out;
}

// --- DNNC feature-space bitstream ---

// Per-channel adaptive models over the [0, beta] alphabet, channels
// stored sequentially in raster order.
inline Bitstream encode_dnnc(const Tensor<int>& symbols,
                             const QuantizerSpec& spec, std::int64_t orig_h,
                             std::int64_t orig_w) {
  check(symbols.rank() == 4 && symbols.dim(0) == 1,
        "encode_dnnc: expected (1,N,h,w) symbols");
  BitstreamHeader h;
  h.path = Framework::dnnc;
  h.mode = kModeFull;
  h.height = orig_h;
  h.width = orig_w;
  h.n_maps = static_cast<int>(symbols.dim(1));
  h.qspec = spec;
  ArithEncoder enc;
  std::int64_t plane = symbols.dim(2) * symbols.dim(3);
  for (std::int64_t c = 0; c < symbols.dim(1); ++c) {
    SymbolModel model(spec.beta + 1);
    for (std::int64_t i = 0; i < plane; ++i) {
      int s = symbols[c * plane + i];
      check(s >= 0 && s <= spec.beta, "encode_dnnc: symbol out of range");
      enc.encode(model, s);
    }
  }
  return detail::seal_bitstream(h, enc.finish());
}

inline Tensor<int> decode_dnnc(const Bitstream& bs,
                               BitstreamHeader* header = nullptr) {
  BitstreamHeader h = parse_bitstream_header(bs);
  check(h.path == Framework::dnnc, "decode_dnnc: not a DNNC stream");
  if (header) *header = h;
  check(h.height % 4 == 0 && h.width % 4 == 0,
        "decode_dnnc: extents not divisible by the encoder stride");
  std::int64_t ch = h.height / 4, cw = h.width / 4;
  Tensor<int> out({1, h.n_maps, ch, cw});
  ArithDecoder dec(bs.bytes.data() + h.header_bytes,
                   bs.bytes.size() - h.header_bytes - 4);
  std::int64_t plane = ch * cw;
  for (std::int64_t c = 0; c < h.n_maps; ++c) {
    SymbolModel model(h.qspec.beta + 1);
    for (std::int64_t i = 0; i < plane; ++i)
      out[c * plane + i] = dec.decode(model);
  }
  return out;
}

inline void save_bitstream(const std::string& path, const Bitstream& bs) {
  std::string s(reinterpret_cast<const char*>(bs.bytes.data()),
                bs.bytes.size());
  detail::write_file(path, s);
}

inline Bitstream load_bitstream(const std::string& path) {
  std::string s = detail::read_file(path);
  Bitstream bs;
  bs.bytes.assign(s.begin(), s.end());
  return bs;
}

}  // namespace vcn

#endif  // VCN_CODEC_HPP_
