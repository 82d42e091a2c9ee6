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

#ifndef VCN_IMAGE_HPP_
#define VCN_IMAGE_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "vcn/tensor.hpp"

namespace vcn {

struct GrayImage {
  std::int64_t width = 0, height = 0;
  std::vector<std::uint8_t> samples;  // row-major

  std::uint8_t at(std::int64_t y, std::int64_t x) const {
    return samples[static_cast<std::size_t>(y * width + x)];
  }
  std::uint8_t& at(std::int64_t y, std::int64_t x) {
    return samples[static_cast<std::size_t>(y * width + x)];
  }
};

namespace detail {

class PgmParser {
 public:
  explicit PgmParser(std::string bytes) : bytes_(std::move(bytes)) {}

  GrayImage parse() {
    check(take() == 'P' && take() == '5',
          "pgm: expected magic P5 at byte 0");
    std::int64_t w = next_int("width");
    std::int64_t h = next_int("height");
    std::int64_t maxval = next_int("maxval");
    check(maxval == 255, "pgm: maxval " + std::to_string(maxval) +
                             " unsupported (expected 255) at byte " +
                             std::to_string(pos_ - 1));
    // exactly one whitespace byte separates the header from the payload
    check(pos_ < bytes_.size() && is_space(bytes_[pos_]),
          "pgm: missing header terminator at byte " + std::to_string(pos_));
    ++pos_;
    std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    check(bytes_.size() - pos_ >= need,
          "pgm: truncated payload at byte " + std::to_string(bytes_.size()) +
              " (need " + std::to_string(need) + " sample bytes)");
    GrayImage img;
    img.width = w;
    img.height = h;
    img.samples.assign(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                       bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + need));
    return img;
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  }
  char take() {
    check(pos_ < bytes_.size(),
          "pgm: truncated header at byte " + std::to_string(pos_));
    return bytes_[pos_++];
  }
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }
  std::int64_t next_int(const char* what) {
    skip_space_and_comments();
    std::size_t start = pos_;
    std::int64_t v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      ++pos_;
      check(v < (std::int64_t(1) << 31), std::string("pgm: ") + what +
                                             " overflows at byte " +
                                             std::to_string(start));
    }
    check(pos_ > start, std::string("pgm: expected ") + what + " at byte " +
                            std::to_string(start));
    return v;
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

inline std::string read_binary(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  check(f != nullptr, "cannot open: " + path);
  std::string out;
  char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  std::fclose(f);
  return out;
}

}  // namespace detail

inline GrayImage decode_pgm(const std::string& bytes) {
  return detail::PgmParser(bytes).parse();
}

inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.samples.data()),
             img.samples.size());
  return out;
}

// Top-left anchored crop to multiples of 8 on both axes.
inline GrayImage crop_to_block_multiple(const GrayImage& img) {
  std::int64_t w = img.width - img.width % 8;
  std::int64_t h = img.height - img.height % 8;
  check(w >= 8 && h >= 8,
        "image " + std::to_string(img.width) + "x" +
            std::to_string(img.height) + " smaller than one 8x8 block");
  GrayImage out;
  out.width = w;
  out.height = h;
  out.samples.resize(static_cast<std::size_t>(w * h));
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x) out.at(y, x) = img.at(y, x);
  return out;
}

inline GrayImage load_image(const std::string& path) {
  return crop_to_block_multiple(decode_pgm(detail::read_binary(path)));
}

inline void save_image(const std::string& path, const GrayImage& img) {
  std::string bytes = encode_pgm(img);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  check(f != nullptr, "cannot open for writing: " + path);
  std::size_t n = std::fwrite(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
  check(n == bytes.size(), "short write: " + path);
}

// [0,255] -> [0,1] as a (1,1,H,W) tensor.
template <typename T>
Tensor<T> image_to_tensor(const GrayImage& img) {
  Tensor<T> t({1, 1, img.height, img.width});
  for (std::int64_t i = 0; i < t.numel(); ++i)
    t[i] = static_cast<T>(img.samples[static_cast<std::size_t>(i)]) /
           T(255);
  return t;
}

// [0,1] -> 8-bit with clamping and round-half-away-from-zero.
template <typename T>
GrayImage tensor_to_image(const Tensor<T>& t) {
  check(t.rank() == 4 && t.dim(0) == 1 && t.dim(1) == 1,
        "tensor_to_image: expected (1,1,H,W), got " + t.shape_string());
  GrayImage img;
  img.height = t.dim(2);
  img.width = t.dim(3);
  img.samples.resize(static_cast<std::size_t>(img.width * img.height));
  for (std::int64_t i = 0; i < t.numel(); ++i) {
    double v = static_cast<double>(t[i]) * 255.0;
    long r = std::lround(v);
    img.samples[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
  }
  return img;
}

}  // namespace vcn

#endif  // VCN_IMAGE_HPP_
