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

#ifndef VCN_ARITH_HPP_
#define VCN_ARITH_HPP_

#include <cstdint>
#include <vector>

#include "vcn/common.hpp"

namespace vcn {

// Adaptive frequency table over a fixed alphabet. Counts start at one,
// grow by a fixed increment on every emitted symbol, and are halved when
// the running total reaches the ceiling (keeping every count >= 1).
// Encoder and decoder evolve identical tables given identical streams.
class SymbolModel {
 public:
  explicit SymbolModel(int alphabet, std::uint32_t increment = 32,
                       std::uint32_t ceiling = 1u << 16)
      : freq_(static_cast<std::size_t>(alphabet), 1),
        total_(static_cast<std::uint32_t>(alphabet)),
        increment_(increment),
        ceiling_(ceiling) {
    check(alphabet >= 1, "symbol model: empty alphabet");
    check(ceiling_ >= 2 * freq_.size() && ceiling_ <= (1u << 16),
          "symbol model: ceiling out of range");
  }

  int alphabet() const { return static_cast<int>(freq_.size()); }
  std::uint32_t total() const { return total_; }

  void cum_range(int symbol, std::uint32_t* lo, std::uint32_t* hi) const {
    std::uint32_t acc = 0;
    for (int s = 0; s < symbol; ++s) acc += freq_[static_cast<std::size_t>(s)];
    *lo = acc;
    *hi = acc + freq_[static_cast<std::size_t>(symbol)];
  }

  int symbol_from_target(std::uint32_t target, std::uint32_t* lo,
                         std::uint32_t* hi) const {
    std::uint32_t acc = 0;
    for (std::size_t s = 0; s < freq_.size(); ++s) {
      if (target < acc + freq_[s]) {
        *lo = acc;
        *hi = acc + freq_[s];
        return static_cast<int>(s);
      }
      acc += freq_[s];
    }
    fail("arith: decode target outside model range (model desync)");
  }

  void update(int symbol) {
    freq_[static_cast<std::size_t>(symbol)] += increment_;
    total_ += increment_;
    if (total_ >= ceiling_) {
      total_ = 0;
      for (std::uint32_t& f : freq_) {
        f = (f + 1) >> 1;
        total_ += f;
      }
    }
  }

 private:
  std::vector<std::uint32_t> freq_;
  std::uint32_t total_;
  std::uint32_t increment_;
  std::uint32_t ceiling_;
};

namespace detail {
inline constexpr std::uint32_t kArithHalf = 0x80000000u;
inline constexpr std::uint32_t kArithQuarter = 0x40000000u;
inline constexpr std::uint32_t kArithThreeQuarters = 0xC0000000u;
}  // namespace detail

class ArithEncoder {
 public:
  void encode(SymbolModel& model, int symbol) {
    check(symbol >= 0 && symbol < model.alphabet(),
          "arith: symbol outside alphabet");
    std::uint32_t lo_count, hi_count;
    model.cum_range(symbol, &lo_count, &hi_count);
    narrow(lo_count, hi_count, model.total());
    model.update(symbol);
  }

  // Raw bits through the coder (fixed half split), most significant first.
  void encode_bits(std::uint32_t value, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) encode_raw_bit((value >> i) & 1);
  }

  void encode_raw_bit(std::uint32_t bit) {
    std::uint64_t range = std::uint64_t(hi_) - lo_ + 1;
    std::uint32_t mid = lo_ + static_cast<std::uint32_t>(range >> 1) - 1;
    if (bit) lo_ = mid + 1;
    else hi_ = mid;
    renormalize();
  }

  std::vector<std::uint8_t> finish() {
    ++pending_;
    put_bit(lo_ >= detail::kArithQuarter ? 1 : 0);
    if (bit_count_ > 0) {
      out_.push_back(static_cast<std::uint8_t>(bit_buf_ << (8 - bit_count_)));
      bit_buf_ = 0;
      bit_count_ = 0;
    }
    return std::move(out_);
  }

 private:
  void narrow(std::uint32_t lo_count, std::uint32_t hi_count,
              std::uint32_t total) {
    std::uint64_t range = std::uint64_t(hi_) - lo_ + 1;
    hi_ = lo_ + static_cast<std::uint32_t>(range * hi_count / total) - 1;
    lo_ = lo_ + static_cast<std::uint32_t>(range * lo_count / total);
    renormalize();
  }

  void renormalize() {
    for (;;) {
      if (hi_ < detail::kArithHalf) {
        put_bit(0);
      } else if (lo_ >= detail::kArithHalf) {
        put_bit(1);
        lo_ -= detail::kArithHalf;
        hi_ -= detail::kArithHalf;
      } else if (lo_ >= detail::kArithQuarter &&
                 hi_ < detail::kArithThreeQuarters) {
        ++pending_;
        lo_ -= detail::kArithQuarter;
        hi_ -= detail::kArithQuarter;
      } else {
        break;
      }
      lo_ <<= 1;
      hi_ = (hi_ << 1) | 1;
    }
  }

  void put_bit(std::uint32_t bit) {
    push_bit(bit);
    for (; pending_ > 0; --pending_) push_bit(bit ^ 1);
  }

  void push_bit(std::uint32_t bit) {
    bit_buf_ = static_cast<std::uint8_t>((bit_buf_ << 1) | bit);
    if (++bit_count_ == 8) {
      out_.push_back(bit_buf_);
      bit_buf_ = 0;
      bit_count_ = 0;
    }
  }

  std::vector<std::uint8_t> out_;
  std::uint32_t lo_ = 0;
  std::uint32_t hi_ = 0xFFFFFFFFu;
  std::uint64_t pending_ = 0;
  std::uint8_t bit_buf_ = 0;
  int bit_count_ = 0;
};

class ArithDecoder {
 public:
  ArithDecoder(const std::uint8_t* bytes, std::size_t size)
      : bytes_(bytes), size_(size) {
    for (int i = 0; i < 32; ++i) code_ = (code_ << 1) | next_bit();
  }

  int decode(SymbolModel& model) {
    std::uint64_t range = std::uint64_t(hi_) - lo_ + 1;
    std::uint32_t target = static_cast<std::uint32_t>(
        ((std::uint64_t(code_ - lo_) + 1) * model.total() - 1) / range);
    std::uint32_t lo_count, hi_count;
    int symbol = model.symbol_from_target(target, &lo_count, &hi_count);
    narrow(lo_count, hi_count, model.total());
    model.update(symbol);
    return symbol;
  }

  std::uint32_t decode_bits(int nbits) {
    std::uint32_t v = 0;
    for (int i = 0; i < nbits; ++i) v = (v << 1) | decode_raw_bit();
    return v;
  }

  std::uint32_t decode_raw_bit() {
    std::uint64_t range = std::uint64_t(hi_) - lo_ + 1;
    std::uint32_t mid = lo_ + static_cast<std::uint32_t>(range >> 1) - 1;
    std::uint32_t bit = code_ > mid ? 1 : 0;
    if (bit) lo_ = mid + 1;
    else hi_ = mid;
    renormalize();
    return bit;
  }

 private:
  void narrow(std::uint32_t lo_count, std::uint32_t hi_count,
              std::uint32_t total) {
    std::uint64_t range = std::uint64_t(hi_) - lo_ + 1;
    hi_ = lo_ + static_cast<std::uint32_t>(range * hi_count / total) - 1;
    lo_ = lo_ + static_cast<std::uint32_t>(range * lo_count / total);
    renormalize();
  }

  void renormalize() {
    for (;;) {
      if (hi_ < detail::kArithHalf) {
      } else if (lo_ >= detail::kArithHalf) {
        code_ -= detail::kArithHalf;
        lo_ -= detail::kArithHalf;
        hi_ -= detail::kArithHalf;
      } else if (lo_ >= detail::kArithQuarter &&
                 hi_ < detail::kArithThreeQuarters) {
        code_ -= detail::kArithQuarter;
        lo_ -= detail::kArithQuarter;
        hi_ -= detail::kArithQuarter;
      } else {
        break;
      }
      lo_ <<= 1;
      hi_ = (hi_ << 1) | 1;
      code_ = (code_ << 1) | next_bit();
    }
  }

  // Bits past the end of the stream read as zero.
  std::uint32_t next_bit() {
    if (pos_ >= size_) return 0;
    std::uint32_t bit = (bytes_[pos_] >> (7 - bit_pos_)) & 1;
    if (++bit_pos_ == 8) {
      bit_pos_ = 0;
      ++pos_;
    }
    return bit;
  }

  const std::uint8_t* bytes_;
  std::size_t size_;
  std::size_t pos_ = 0;
  int bit_pos_ = 0;
  std::uint32_t lo_ = 0;
  std::uint32_t hi_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

// One-model stream coding of a symbol sequence.
inline std::vector<std::uint8_t> arith_encode(const std::vector<int>& symbols,
                                              int alphabet) {
  SymbolModel model(alphabet);
  ArithEncoder enc;
  for (int s : symbols) enc.encode(model, s);
  return enc.finish();
}

inline std::vector<int> arith_decode(const std::vector<std::uint8_t>& bytes,
                                     std::size_t count, int alphabet) {
  SymbolModel model(alphabet);
  ArithDecoder dec(bytes.data(), bytes.size());
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(dec.decode(model));
  return out;
}

}  // namespace vcn

#endif  // VCN_ARITH_HPP_
