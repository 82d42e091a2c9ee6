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

#ifndef VCN_QUANTIZER_HPP_
#define VCN_QUANTIZER_HPP_

#include <cmath>
#include <cstdio>
#include <vector>

#include "vcn/tensor.hpp"

namespace vcn {

// Frozen range statistics of the feature-space quantizer. Once fitted on
// the pre-trained encoder's training codes, y_min/y_max never change.
struct QuantizerSpec {
  int beta = 64;
  double y_min = 0.0;
  double y_max = 0.0;

  double step() const { return (y_max - y_min) / beta; }
};

// Global min/max over every provided code tensor. Warns (but proceeds)
// when the range does not straddle zero.
template <typename T>
QuantizerSpec fit_range(const std::vector<Tensor<T>>& train_codes,
                        int beta = 64, bool* warned = nullptr) {
  check(beta >= 1, "fit_range: beta must be >= 1");
  check(!train_codes.empty(), "fit_range: empty code sequence");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Tensor<T>& t : train_codes)
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      double v = static_cast<double>(t[i]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  check(lo < hi, "fit_range: degenerate range (y_min == y_max)");
  QuantizerSpec spec;
  spec.beta = beta;
  spec.y_min = lo;
  spec.y_max = hi;
  bool straddles = lo < 0.0 && hi > 0.0;
  if (warned) *warned = !straddles;
  if (!straddles)
    std::fprintf(stderr,
                 "warning: quantizer range [%g, %g] does not straddle zero\n",
                 lo, hi);
  return spec;
}

inline int quantize_value(double y, const QuantizerSpec& spec) {
  double t = spec.beta * (y - spec.y_min) / (spec.y_max - spec.y_min);
  // round half away from zero; t >= 0 inside the range
  int s = static_cast<int>(std::lround(t));
  return s < 0 ? 0 : (s > spec.beta ? spec.beta : s);
}

inline double dequantize_value(int symbol, const QuantizerSpec& spec) {
  return static_cast<double>(symbol) / spec.beta * (spec.y_max - spec.y_min) +
         spec.y_min;
}

// Integer symbols in [0, beta]; out-of-range inputs clamp to the ends.
template <typename T>
Tensor<int> quantize_symbols(const Tensor<T>& y, const QuantizerSpec& spec) {
  Tensor<int> out(y.shape());
  for (std::int64_t i = 0; i < y.numel(); ++i)
    out[i] = quantize_value(static_cast<double>(y[i]), spec);
  return out;
}

template <typename T>
Tensor<T> dequantize(const Tensor<int>& symbols, const QuantizerSpec& spec) {
  Tensor<T> out(symbols.shape());
  for (std::int64_t i = 0; i < symbols.numel(); ++i) {
    check(symbols[i] >= 0 && symbols[i] <= spec.beta,
          "dequantize: symbol " + std::to_string(symbols[i]) +
              " outside [0, " + std::to_string(spec.beta) + "]");
    out[i] = static_cast<T>(dequantize_value(symbols[i], spec));
  }
  return out;
}

// Z = q(Y, beta): quantize then dequantize onto the reconstruction lattice.
template <typename T>
Tensor<T> quantize_dequantize(const Tensor<T>& y, const QuantizerSpec& spec) {
  return dequantize<T>(quantize_symbols(y, spec), spec);
}

}  // namespace vcn

#endif  // VCN_QUANTIZER_HPP_
