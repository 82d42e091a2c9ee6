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

#ifndef VCN_DATASET_HPP_
#define VCN_DATASET_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "vcn/image.hpp"

namespace vcn {

template <typename T>
struct PatchSet {
  int patch = 160;
  std::vector<Tensor<T>> patches;       // (1,1,patch,patch), values in [0,1]
  std::vector<std::string> sources;     // one id per patch
  std::int64_t size() const { return static_cast<std::int64_t>(patches.size()); }
};

struct BatchPlan {
  int batch = 4;
  std::uint64_t seed = 1;
  std::int64_t epoch_len(std::int64_t n) const { return n / batch; }
};

// Sliding-window extraction; images smaller than the patch are rejected
// (skipped), never upscaled.
template <typename T>
PatchSet<T> extract_patches(const std::vector<GrayImage>& images,
                            const std::vector<std::string>& names,
                            int patch = 160, int stride = 160) {
  check(patch >= 1 && stride >= 1, "extract_patches: bad patch/stride");
  PatchSet<T> set;
  set.patch = patch;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const GrayImage& img = images[i];
    if (img.width < patch || img.height < patch) continue;
    for (std::int64_t y = 0; y + patch <= img.height; y += stride)
      for (std::int64_t x = 0; x + patch <= img.width; x += stride) {
        Tensor<T> t({1, 1, patch, patch});
        for (std::int64_t py = 0; py < patch; ++py)
          for (std::int64_t px = 0; px < patch; ++px)
            t.at(0, 0, py, px) =
                static_cast<T>(img.at(y + py, x + px)) / T(255);
        set.patches.push_back(std::move(t));
        set.sources.push_back(i < names.size() ? names[i]
                                               : std::to_string(i));
      }
  }
  check(!set.patches.empty(),
        "extract_patches: no eligible image (all smaller than " +
            std::to_string(patch) + "x" + std::to_string(patch) + ")");
  return set;
}

// One of the 8 dihedral transforms (4 rotations x optional horizontal
// flip), chosen uniformly from rng.
template <typename T>
Tensor<T> dihedral(const Tensor<T>& p, int which) {
  check(p.rank() == 4 && p.dim(2) == p.dim(3), "augment: patch must be square");
  int rot = which & 3;
  bool flip = (which >> 2) & 1;
  std::int64_t n = p.dim(2);
  Tensor<T> out(p.shape());
  for (std::int64_t c = 0; c < p.dim(0) * p.dim(1); ++c) {
    const T* src = p.data() + c * n * n;
    T* dst = out.data() + c * n * n;
    for (std::int64_t y = 0; y < n; ++y)
      for (std::int64_t x = 0; x < n; ++x) {
        std::int64_t sy = y, sx = x;
        if (flip) sx = n - 1 - sx;
        for (int r = 0; r < rot; ++r) {
          std::int64_t ty = sy;
          sy = n - 1 - sx;  // rotate 90 degrees clockwise per step
          sx = ty;
        }
        dst[y * n + x] = src[sy * n + sx];
      }
  }
  return out;
}

template <typename T, typename Rng>
Tensor<T> augment(const Tensor<T>& patch, Rng& rng) {
  std::uniform_int_distribution<int> d(0, 7);
  return dihedral(patch, d(rng));
}

// Epoch batching: seeded shuffle, floor(n/m) batches, remainder dropped.
template <typename T>
class Batcher {
 public:
  Batcher(const PatchSet<T>& set, BatchPlan plan, bool augment_draws = false)
      : set_(set), plan_(plan), augment_(augment_draws) {
    check(plan.batch >= 1, "batches: batch size must be positive");
    check(plan.batch <= set.size(),
          "batches: batch size " + std::to_string(plan.batch) +
              " exceeds patch count " + std::to_string(set.size()));
  }

  std::int64_t batches_per_epoch() const {
    return plan_.epoch_len(set_.size());
  }

  // Patch indices drawn by epoch `e`, in draw order.
  std::vector<int> epoch_order(std::int64_t e) const {
    std::vector<int> idx(static_cast<std::size_t>(set_.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(plan_.seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(e + 1));
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(batches_per_epoch() * plan_.batch));
    return idx;
  }

  // Batch `b` of epoch `e` as an (m,1,p,p) tensor.
  Tensor<T> batch(std::int64_t e, std::int64_t b) const {
    std::vector<int> order = epoch_order(e);
    std::int64_t m = plan_.batch, p = set_.patch;
    check(b >= 0 && b < batches_per_epoch(), "batches: index out of range");
    Tensor<T> out({m, 1, p, p});
    std::mt19937_64 rng(plan_.seed ^ (0xA24BAED4963EE407ULL *
                                      static_cast<std::uint64_t>(e * 131071 + b + 1)));
    for (std::int64_t j = 0; j < m; ++j) {
      int pi = order[static_cast<std::size_t>(b * m + j)];
      Tensor<T> patch = augment_ ? augment(set_.patches[pi], rng)
                                 : set_.patches[pi];
      std::copy(patch.data(), patch.data() + p * p,
                out.data() + j * p * p);
    }
    return out;
  }

 private:
  const PatchSet<T>& set_;
  BatchPlan plan_;
  bool augment_;
};

// --- corpus loading and plain key-value configs ---

inline std::vector<std::string> list_pgm_files(const std::string& dir) {
  namespace fs = std::filesystem;
  check(fs::is_directory(dir), "not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm")
      out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline void load_corpus(const std::string& dir, std::vector<GrayImage>& images,
                        std::vector<std::string>& names) {
  for (const std::string& path : list_pgm_files(dir)) {
    images.push_back(load_image(path));
    names.push_back(std::filesystem::path(path).filename().string());
  }
  check(!images.empty(), "no .pgm files under " + dir);
}

// `key = value` lines, '#' comments.
inline std::map<std::string, std::string> parse_kv_file(
    const std::string& path) {
  std::ifstream in(path);
  check(in.good(), "cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = line.substr(0, line.find('#'));
    auto trim = [](std::string v) {
      std::size_t a = v.find_first_not_of(" \t\r");
      std::size_t b = v.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
    };
    s = trim(s);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    check(eq != std::string::npos, path + ":" + std::to_string(lineno) +
                                       ": expected key = value");
    kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
  return kv;
}

struct DatasetConfig {
  std::string train_dir, val_dir;
  int patch_stride = 160;
  std::uint64_t seed = 1;
};

inline DatasetConfig load_dataset_config(const std::string& path) {
  auto kv = parse_kv_file(path);
  DatasetConfig c;
  if (kv.count("train_dir")) c.train_dir = kv["train_dir"];
  if (kv.count("val_dir")) c.val_dir = kv["val_dir"];
  if (kv.count("patch_stride")) c.patch_stride = std::stoi(kv["patch_stride"]);
  if (kv.count("seed")) c.seed = std::stoull(kv["seed"]);
  return c;
}

}  // namespace vcn

#endif  // VCN_DATASET_HPP_
