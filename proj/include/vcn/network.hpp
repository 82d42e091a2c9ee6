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

#ifndef VCN_NETWORK_HPP_
#define VCN_NETWORK_HPP_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "vcn/conv.hpp"

namespace vcn {

enum class LayerKind { conv, conv_transpose };

// skip_from: kSkipNone, or the index of an earlier layer (kSkipInput for
// the network input) whose output is added before the activation.
inline constexpr int kSkipNone = -2;
inline constexpr int kSkipInput = -1;

struct LayerSpec {
  LayerKind kind = LayerKind::conv;
  std::int64_t in_ch = 1, out_ch = 1;
  int k = 3, stride = 1, pad = 1, output_padding = 0;
  bool relu = false;
  int skip_from = kSkipNone;
};

inline LayerSpec conv_layer(std::int64_t in_ch, std::int64_t out_ch, int k,
                            int stride, bool relu, int skip_from = kSkipNone) {
  LayerSpec s;
  s.kind = LayerKind::conv;
  s.in_ch = in_ch;
  s.out_ch = out_ch;
  s.k = k;
  s.stride = stride;
  s.pad = k / 2;  // "same"-style: spatial size follows stride alone
  s.relu = relu;
  s.skip_from = skip_from;
  return s;
}

inline LayerSpec deconv_layer(std::int64_t in_ch, std::int64_t out_ch, int k,
                              int stride, bool relu) {
  LayerSpec s;
  s.kind = LayerKind::conv_transpose;
  s.in_ch = in_ch;
  s.out_ch = out_ch;
  s.k = k;
  s.stride = stride;
  s.pad = k / 2;
  s.output_padding = stride - 1;  // even target extents: H -> stride*H
  s.relu = relu;
  return s;
}

template <typename T>
struct Network {
  std::string name;
  ResolutionMode mode = ResolutionMode::full;
  std::vector<LayerSpec> layers;
  std::vector<Tensor<T>> weights, biases;

  std::vector<Tensor<T>*> params() {
    std::vector<Tensor<T>*> out;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      out.push_back(&weights[i]);
      out.push_back(&biases[i]);
    }
    return out;
  }
  std::vector<const Tensor<T>*> params() const {
    std::vector<const Tensor<T>*> out;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      out.push_back(&weights[i]);
      out.push_back(&biases[i]);
    }
    return out;
  }
  std::int64_t param_count() const {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < layers.size(); ++i)
      n += weights[i].numel() + biases[i].numel();
    return n;
  }

  template <typename U>
  Network<U> cast() const {
    Network<U> out;
    out.name = name;
    out.mode = mode;
    out.layers = layers;
    for (const auto& w : weights) out.weights.push_back(w.template cast<U>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<U>());
    return out;
  }
};

// Fan-in-scaled uniform init (He-style bounds), biases zero.
template <typename T>
void init_params(Network<T>& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  net.weights.clear();
  net.biases.clear();
  for (const LayerSpec& s : net.layers) {
    std::int64_t fan_in = s.in_ch * s.k * s.k;
    T bound = static_cast<T>(std::sqrt(6.0 / static_cast<double>(fan_in)));
    std::vector<std::int64_t> wshape =
        s.kind == LayerKind::conv
            ? std::vector<std::int64_t>{s.out_ch, s.in_ch, s.k, s.k}
            : std::vector<std::int64_t>{s.in_ch, s.out_ch, s.k, s.k};
    net.weights.push_back(Tensor<T>::uniform(wshape, -bound, bound, rng));
    net.biases.push_back(Tensor<T>::zeros({s.out_ch}));
  }
}

template <typename T>
struct ForwardVars {
  Var out;
  std::vector<Var> weight_vars, bias_vars;
};

// Runs the network on the tape. train=true registers parameters as
// tracked leaves so backward() yields their gradients.
template <typename T>
ForwardVars<T> forward(const Network<T>& net, Tape<T>& t, Var x, bool train) {
  const Tensor<T>& tx = t.val(x);
  check(tx.rank() == 4, net.name + ": input must be NCHW");
  if (net.mode == ResolutionMode::low)
    check(tx.dim(2) % 2 == 0 && tx.dim(3) % 2 == 0,
          net.name + ": low-resolution mode needs even spatial extents");
  ForwardVars<T> fv;
  std::vector<Var> outs;
  Var cur = x;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& s = net.layers[i];
    Var w = t.leaf(net.weights[i], train);
    Var b = t.leaf(net.biases[i], train);
    fv.weight_vars.push_back(w);
    fv.bias_vars.push_back(b);
    Var y = s.kind == LayerKind::conv
                ? conv2d(t, cur, w, b, s.stride, s.pad)
                : conv2d_transpose(t, cur, w, b, s.stride, s.pad,
                                   s.output_padding);
    if (s.skip_from != kSkipNone)
      y = t.add(y, s.skip_from == kSkipInput
                       ? x
                       : outs[static_cast<std::size_t>(s.skip_from)]);
    if (s.relu) y = t.relu(y);
    outs.push_back(y);
    cur = y;
  }
  fv.out = cur;
  return fv;
}

template <typename T>
Tensor<T> forward_plain(const Network<T>& net, const Tensor<T>& x) {
  Tape<T> t;
  return t.val(forward(net, t, t.constant(x), false).out);
}

// RSN: seven convolutions, 9x9 at both ends, five 3x3 in the middle,
// 128 feature maps, ReLU everywhere but the last layer. The second layer
// carries the resolution switch (stride 2 in low mode).
template <typename T>
Network<T> build_rsn(ResolutionMode mode, std::uint64_t seed = 1) {
  Network<T> net;
  net.name = "rsn";
  net.mode = mode;
  int s2 = mode == ResolutionMode::low ? 2 : 1;
  net.layers = {
      conv_layer(1, 128, 9, 1, true),  conv_layer(128, 128, 3, s2, true),
      conv_layer(128, 128, 3, 1, true), conv_layer(128, 128, 3, 1, true),
      conv_layer(128, 128, 3, 1, true), conv_layer(128, 128, 3, 1, true),
      conv_layer(128, 1, 9, 1, false),
  };
  init_params(net, seed);
  return net;
}

// IDN: seven feature layers (9x9 then six 3x3, 128 maps, ReLU) and a 9x9
// reconstruction layer: stride-2 transposed in low mode, plain conv in
// full mode.
template <typename T>
Network<T> build_idn(ResolutionMode mode, std::uint64_t seed = 2) {
  Network<T> net;
  net.name = "idn";
  net.mode = mode;
  net.layers = {
      conv_layer(1, 128, 9, 1, true),   conv_layer(128, 128, 3, 1, true),
      conv_layer(128, 128, 3, 1, true), conv_layer(128, 128, 3, 1, true),
      conv_layer(128, 128, 3, 1, true), conv_layer(128, 128, 3, 1, true),
      conv_layer(128, 128, 3, 1, true),
  };
  net.layers.push_back(mode == ResolutionMode::low
                           ? deconv_layer(128, 1, 9, 2, false)
                           : conv_layer(128, 1, 9, 1, false));
  init_params(net, seed);
  return net;
}

// VCN shares the IDN structure (independent parameters); its output is
// full-resolution in either mode.
template <typename T>
Network<T> build_vcn(ResolutionMode mode, std::uint64_t seed = 3) {
  Network<T> net = build_idn<T>(mode, seed);
  net.name = "vcn";
  return net;
}

inline const std::vector<int>& dnnc_allowed_maps() {
  static const std::vector<int> allowed = {1, 2, 4, 8, 12, 16, 20};
  return allowed;
}

template <typename T>
struct DnncAutoencoder {
  int n_maps = 4;
  Network<T> encoder, decoder;
};

// Stride-2 autoencoder for feature-space compression: two 5x5/stride-2
// downsampling convs, three residual blocks, and a 3x3 projection to
// n_maps channels; the decoder mirrors it with transposed convs.
template <typename T>
DnncAutoencoder<T> build_dnnc(int n_maps, std::uint64_t seed = 4) {
  const auto& allowed = dnnc_allowed_maps();
  check(std::find(allowed.begin(), allowed.end(), n_maps) != allowed.end(),
        "build_dnnc: feature-map count " + std::to_string(n_maps) +
            " not in {1,2,4,8,12,16,20}");
  DnncAutoencoder<T> ae;
  ae.n_maps = n_maps;
  ae.encoder.name = "rsn";
  ae.encoder.mode = ResolutionMode::low;
  ae.encoder.layers = {
      conv_layer(1, 64, 5, 2, true),
      conv_layer(64, 64, 5, 2, true),
      conv_layer(64, 64, 3, 1, true),
      conv_layer(64, 64, 3, 1, false, 1),  // res block 1
      conv_layer(64, 64, 3, 1, true),
      conv_layer(64, 64, 3, 1, false, 3),  // res block 2
      conv_layer(64, 64, 3, 1, true),
      conv_layer(64, 64, 3, 1, false, 5),  // res block 3
      conv_layer(64, n_maps, 3, 1, false),
  };
  init_params(ae.encoder, seed);
  ae.decoder.name = "idn";
  ae.decoder.mode = ResolutionMode::low;
  ae.decoder.layers = {
      conv_layer(n_maps, 64, 3, 1, true),
      conv_layer(64, 64, 3, 1, true),
      conv_layer(64, 64, 3, 1, false, 0),
      conv_layer(64, 64, 3, 1, true),
      conv_layer(64, 64, 3, 1, false, 2),
      conv_layer(64, 64, 3, 1, true),
      conv_layer(64, 64, 3, 1, false, 4),
      deconv_layer(64, 64, 5, 2, true),
      deconv_layer(64, 1, 5, 2, false),
  };
  init_params(ae.decoder, seed + 1);
  return ae;
}

}  // namespace vcn

#endif  // VCN_NETWORK_HPP_
