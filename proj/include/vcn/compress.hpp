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

#ifndef VCN_COMPRESS_HPP_
#define VCN_COMPRESS_HPP_

#include "vcn/codec.hpp"
#include "vcn/trainer.hpp"

namespace vcn {

namespace detail {

template <typename T>
Tensor<T> clamp01(Tensor<T> t) {
  for (std::int64_t i = 0; i < t.numel(); ++i)
    t[i] = t[i] < T(0) ? T(0) : (t[i] > T(1) ? T(1) : t[i]);
  return t;
}

}  // namespace detail

// End-to-end encoder. Without a pipeline the image goes straight through
// the block codec (the jpeg-like baseline); with one, the re-sampling
// network runs first. `qf` <= 0 falls back to the pipeline's configured
// rate knob.
template <typename T>
Bitstream compress_image(const GrayImage& img, const Pipeline<T>* pipe,
                         int qf = 0) {
  if (!pipe) {
    check(qf >= 1, "compress: the plain codec path needs a QF");
    return encode_scic(img, qf, kModeRaw);
  }
  const TrainConfig& cfg = pipe->cfg;
  Tensor<T> x = image_to_tensor<T>(img);
  if (cfg.framework == Framework::scic) {
    int use_qf = qf >= 1 ? qf : cfg.qf;
    if (cfg.mode == ResolutionMode::low)
      check(img.width % 16 == 0 && img.height % 16 == 0,
            "compress: low-resolution re-sampling needs extents divisible "
            "by 16, got " + std::to_string(img.width) + "x" +
                std::to_string(img.height));
    Tensor<T> y = detail::clamp01(forward_plain(pipe->rsn, x));
    GrayImage y8 = tensor_to_image(y);
    int mode = cfg.mode == ResolutionMode::low ? kModeLow : kModeFull;
    return encode_scic(y8, use_qf, mode, img.height, img.width);
  }
  check(img.width % 4 == 0 && img.height % 4 == 0,
        "compress: feature-space path needs extents divisible by 4");
  Tensor<T> codes = forward_plain(pipe->rsn, x);
  Tensor<int> symbols = quantize_symbols(codes, pipe->qspec);
  return encode_dnnc(symbols, pipe->qspec, img.height, img.width);
}

// End-to-end decoder; the pipeline is required whenever the stream was
// produced through a re-sampling network.
template <typename T>
GrayImage decompress_image(const Bitstream& bs, const Pipeline<T>* pipe) {
  BitstreamHeader h = parse_bitstream_header(bs);
  if (h.path == Framework::scic) {
    GrayImage y8 = decode_scic(bs);
    if (h.mode == kModeRaw) return y8;
    check(pipe != nullptr,
          "decompress: stream was re-sampled; a checkpoint is required");
    check(pipe->cfg.framework == Framework::scic,
          "decompress: checkpoint path does not match the stream");
    int ckpt_mode =
        pipe->cfg.mode == ResolutionMode::low ? kModeLow : kModeFull;
    check(ckpt_mode == h.mode,
          "decompress: checkpoint resolution mode does not match the stream");
    Tensor<T> z = image_to_tensor<T>(y8);
    Tensor<T> out = detail::clamp01(forward_plain(pipe->idn, z));
    return tensor_to_image(out);
  }
  check(pipe != nullptr && pipe->cfg.framework == Framework::dnnc,
        "decompress: feature-space stream needs a matching checkpoint");
  BitstreamHeader hdr;
  Tensor<int> symbols = decode_dnnc(bs, &hdr);
  Tensor<T> z = dequantize<T>(symbols, hdr.qspec);
  Tensor<T> out = detail::clamp01(forward_plain(pipe->idn, z));
  return tensor_to_image(out);
}

}  // namespace vcn

#endif  // VCN_COMPRESS_HPP_
