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

#ifndef VCN_CHECKPOINT_HPP_
#define VCN_CHECKPOINT_HPP_

#include <cstdio>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "vcn/byteio.hpp"
#include "vcn/network.hpp"

namespace vcn {

// Chunked binary checkpoint:
//   "VCNCKPT1"
//   u32 record count
//   per record: u32 name length, name bytes, u32 rank, u64 extents[rank],
//               f32 little-endian values
//   u32 CRC-32 of everything before it
// Multi-byte fields are little-endian.

using NamedTensors = std::vector<std::pair<std::string, Tensor<float>>>;



inline std::string encode_checkpoint(const NamedTensors& tensors) {
  std::string out = "VCNCKPT1";
  detail::put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    detail::put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::int64_t e : t.shape())
      detail::put_u64(out, static_cast<std::uint64_t>(e));
    for (std::int64_t i = 0; i < t.numel(); ++i) detail::put_f32(out, t[i]);
  }
  detail::put_u32(out, crc32(out.data(), out.size()));
  return out;
}

inline NamedTensors decode_checkpoint(const std::string& bytes) {
  check(bytes.size() >= 16, "checkpoint: file too small");
  check(bytes.compare(0, 8, "VCNCKPT1") == 0, "checkpoint: bad magic");
  std::uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i)
    stored_crc |= std::uint32_t(static_cast<unsigned char>(
                      bytes[bytes.size() - 4 + i]))
                  << (8 * i);
  check(crc32(bytes.data(), bytes.size() - 4) == stored_crc,
        "checkpoint: CRC mismatch");
  detail::ByteReader r(
      reinterpret_cast<const unsigned char*>(bytes.data()) + 8,
      bytes.size() - 12);
  NamedTensors out;
  std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.bytes(r.u32());
    std::uint32_t rank = r.u32();
    check(rank >= 1 && rank <= 8, "checkpoint: implausible rank");
    std::vector<std::int64_t> shape;
    std::int64_t numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape.push_back(static_cast<std::int64_t>(r.u64()));
      numel *= shape.back();
    }
    check(numel >= 0 && static_cast<std::uint64_t>(numel) * 4 <= r.remaining(),
          "checkpoint: truncated tensor " + name);
    Tensor<float> t(shape);
    for (std::int64_t j = 0; j < numel; ++j) t[j] = r.f32();
    out.emplace_back(std::move(name), std::move(t));
  }
  check(r.remaining() == 0, "checkpoint: trailing bytes");
  return out;
}

inline void save_checkpoint(const std::string& path,
                            const NamedTensors& tensors) {
  detail::write_file(path, encode_checkpoint(tensors));
}

inline NamedTensors load_checkpoint(const std::string& path) {
  return decode_checkpoint(detail::read_file(path));
}

template <typename T>
void pack_network(NamedTensors& out, const std::string& prefix,
                  const Network<T>& net) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    out.emplace_back(prefix + "." + std::to_string(i) + ".w",
                     net.weights[i].template cast<float>());
    out.emplace_back(prefix + "." + std::to_string(i) + ".b",
                     net.biases[i].template cast<float>());
  }
}

template <typename T>
void unpack_network(const NamedTensors& in, const std::string& prefix,
                    Network<T>& net) {
  auto find = [&](const std::string& name) -> const Tensor<float>& {
    for (const auto& [n, t] : in)
      if (n == name) return t;
    fail("checkpoint: missing tensor " + name);
  };
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Tensor<float>& w = find(prefix + "." + std::to_string(i) + ".w");
    const Tensor<float>& b = find(prefix + "." + std::to_string(i) + ".b");
    check(w.shape() == net.weights[i].shape() &&
              b.shape() == net.biases[i].shape(),
          "checkpoint: tensor shape mismatch at " + prefix + "." +
              std::to_string(i));
    net.weights[i] = w.template cast<T>();
    net.biases[i] = b.template cast<T>();
  }
}

inline bool checkpoint_has(const NamedTensors& in, const std::string& prefix) {
  for (const auto& [n, t] : in)
    if (n.rfind(prefix, 0) == 0) return true;
  return false;
}

}  // namespace vcn

#endif  // VCN_CHECKPOINT_HPP_
