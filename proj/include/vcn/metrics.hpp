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

#ifndef VCN_METRICS_HPP_
#define VCN_METRICS_HPP_

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vcn/compress.hpp"

namespace vcn {

inline constexpr double kPsnrCap = 99.0;  // reported for zero MSE

inline double mse(const GrayImage& a, const GrayImage& b) {
  check(a.width == b.width && a.height == b.height,
        "mse: extent mismatch " + std::to_string(a.width) + "x" +
            std::to_string(a.height) + " vs " + std::to_string(b.width) +
            "x" + std::to_string(b.height));
  double acc = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    double d = double(a.samples[i]) - double(b.samples[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.samples.size());
}

inline double psnr(const GrayImage& a, const GrayImage& b) {
  double m = mse(a, b);
  if (m == 0) return kPsnrCap;
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

// Same windowed-statistics implementation as the DSSIM loss, evaluated
// on [0,1]-normalized intensities.
inline double ssim_metric(const GrayImage& a, const GrayImage& b,
                          const SsimParams& p = {}) {
  check(a.width == b.width && a.height == b.height,
        "ssim: extent mismatch");
  Tensor<double> ta = image_to_tensor<double>(a);
  Tensor<double> tb = image_to_tensor<double>(b);
  return 1.0 - dssim(ta, tb, p);
}

// Header bytes count toward the rate.
inline double bpp(const Bitstream& bs, std::int64_t height,
                  std::int64_t width) {
  check(height > 0 && width > 0, "bpp: empty extents");
  return 8.0 * static_cast<double>(bs.size()) /
         static_cast<double>(height * width);
}

// --- rate-distortion sweeps ---

struct RdRecord {
  std::string method;  // jpeg-like | scic | dnnc
  std::string image;
  int knob = 0;  // QF or feature-map count
  double bpp = 0, psnr = 0, ssim = 0;
};

struct RdConfig {
  std::string corpus_dir;
  std::vector<std::string> methods;  // subset of {jpeg-like, scic, dnnc}
  std::vector<int> qf_knobs = {2, 6, 10, 20, 30, 40, 50, 60};
  std::vector<int> n_knobs = {1, 2, 4, 8, 12, 16, 20};
  std::string checkpoint_dir;  // scic_qf<k>.ckpt, dnnc_n<k>.ckpt
};

struct RdSweepResult {
  std::vector<RdRecord> records;
  std::vector<std::string> missing;  // knobs skipped for lack of checkpoints
};

namespace detail {

inline std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <typename T>
RdRecord evaluate_pair(const std::string& method, const std::string& name,
                       int knob, const GrayImage& img, const Bitstream& bs,
                       const Pipeline<T>* pipe) {
  GrayImage dec = decompress_image<T>(bs, pipe);
  RdRecord r;
  r.method = method;
  r.image = name;
  r.knob = knob;
  r.bpp = bpp(bs, img.height, img.width);
  r.psnr = psnr(img, dec);
  r.ssim = ssim_metric(img, dec);
  return r;
}

}  // namespace detail

template <typename T = float>
RdSweepResult rd_sweep(const RdConfig& cfg) {
  std::vector<GrayImage> images;
  std::vector<std::string> names;
  load_corpus(cfg.corpus_dir, images, names);
  RdSweepResult out;

  auto wants = [&](const std::string& m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) !=
           cfg.methods.end();
  };

  if (wants("jpeg-like")) {
    for (std::size_t i = 0; i < images.size(); ++i)
      for (int qf : cfg.qf_knobs) {
        Bitstream bs = compress_image<T>(images[i], nullptr, qf);
        out.records.push_back(detail::evaluate_pair<T>(
            "jpeg-like", names[i], qf, images[i], bs, nullptr));
      }
  }

  auto run_checkpointed = [&](const std::string& method,
                              const std::vector<int>& knobs,
                              const std::string& stem) {
    for (int knob : knobs) {
      std::string path = cfg.checkpoint_dir + "/" + stem +
                         std::to_string(knob) + ".ckpt";
      if (!std::ifstream(path).good()) {
        out.missing.push_back(method + " knob " + std::to_string(knob) +
                              ": no checkpoint at " + path);
        continue;
      }
      Pipeline<T> pipe = unpack_pipeline<T>(load_checkpoint(path));
      for (std::size_t i = 0; i < images.size(); ++i) {
        Bitstream bs = compress_image<T>(images[i], &pipe,
                                         method == "scic" ? knob : 0);
        out.records.push_back(detail::evaluate_pair<T>(
            method, names[i], knob, images[i], bs, &pipe));
      }
    }
  };
  if (wants("scic")) run_checkpointed("scic", cfg.qf_knobs, "scic_qf");
  if (wants("dnnc")) run_checkpointed("dnnc", cfg.n_knobs, "dnnc_n");

  std::sort(out.records.begin(), out.records.end(),
            [](const RdRecord& a, const RdRecord& b) {
              if (a.method != b.method) return a.method < b.method;
              if (a.image != b.image) return a.image < b.image;
              return a.bpp < b.bpp;
            });
  return out;
}

// Stable CSV: fixed column order, 6 significant digits.
inline std::string rd_records_csv(const std::vector<RdRecord>& records) {
  std::string out = "method,image,knob,bpp,psnr,ssim\n";
  for (const RdRecord& r : records) {
    out += r.method + "," + r.image + "," + std::to_string(r.knob) + "," +
           detail::format_sig6(r.bpp) + "," + detail::format_sig6(r.psnr) +
           "," + detail::format_sig6(r.ssim) + "\n";
  }
  return out;
}

// --- SVG emission (bpp vs PSNR and bpp vs SSIM, one series per method) ---

namespace detail {

struct SvgPanel {
  double x0, y0, w, h;  // plot area in page coordinates
  double min_x, max_x, min_y, max_y;
  double px(double x) const {
    return x0 + (x - min_x) / (max_x - min_x) * w;
  }
  double py(double y) const {
    return y0 + h - (y - min_y) / (max_y - min_y) * h;
  }
};

inline void svg_panel(std::ostringstream& svg, const SvgPanel& p,
                      const std::vector<RdRecord>& records, bool use_psnr,
                      const std::string& y_label) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e"};
  svg << "<rect x='" << p.x0 << "' y='" << p.y0 << "' width='" << p.w
      << "' height='" << p.h << "' fill='none' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = p.min_x + (p.max_x - p.min_x) * i / 4;
    double fy = p.min_y + (p.max_y - p.min_y) * i / 4;
    svg << "<text x='" << p.px(fx) << "' y='" << p.y0 + p.h + 16
        << "' font-size='10' text-anchor='middle'>" << format_sig6(fx)
        << "</text>\n";
    svg << "<text x='" << p.x0 - 6 << "' y='" << p.py(fy) + 3
        << "' font-size='10' text-anchor='end'>" << format_sig6(fy)
        << "</text>\n";
  }
  svg << "<text x='" << p.x0 + p.w / 2 << "' y='" << p.y0 + p.h + 32
      << "' font-size='12' text-anchor='middle'>bpp</text>\n";
  svg << "<text x='" << p.x0 - 44 << "' y='" << p.y0 + p.h / 2
      << "' font-size='12' text-anchor='middle' transform='rotate(-90 "
      << p.x0 - 44 << " " << p.y0 + p.h / 2 << ")'>" << y_label
      << "</text>\n";

  std::vector<std::string> methods;
  for (const RdRecord& r : records)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    // mean metric per knob, sorted by mean bpp
    std::vector<std::pair<double, double>> pts;
    std::vector<int> knobs;
    for (const RdRecord& r : records)
      if (r.method == methods[m] &&
          std::find(knobs.begin(), knobs.end(), r.knob) == knobs.end())
        knobs.push_back(r.knob);
    for (int k : knobs) {
      double sx = 0, sy = 0;
      int n = 0;
      for (const RdRecord& r : records)
        if (r.method == methods[m] && r.knob == k) {
          sx += r.bpp;
          sy += use_psnr ? r.psnr : r.ssim;
          ++n;
        }
      if (n) pts.emplace_back(sx / n, sy / n);
    }
    std::sort(pts.begin(), pts.end());
    svg << "<polyline fill='none' stroke='" << colors[m % 5]
        << "' stroke-width='1.5' points='";
    for (auto& [x, y] : pts) svg << p.px(x) << "," << p.py(y) << " ";
    svg << "'/>\n";
    for (auto& [x, y] : pts)
      svg << "<circle cx='" << p.px(x) << "' cy='" << p.py(y)
          << "' r='2.5' fill='" << colors[m % 5] << "'/>\n";
    svg << "<text x='" << p.x0 + 8 << "' y='" << p.y0 + 14 + 14 * m
        << "' font-size='11' fill='" << colors[m % 5] << "'>" << methods[m]
        << "</text>\n";
  }
}

}  // namespace detail

inline std::string rd_records_svg(const std::vector<RdRecord>& records) {
  double min_bpp = 1e9, max_bpp = 0, min_p = 1e9, max_p = 0, min_s = 1e9,
         max_s = 0;
  for (const RdRecord& r : records) {
    min_bpp = std::min(min_bpp, r.bpp);
    max_bpp = std::max(max_bpp, r.bpp);
    min_p = std::min(min_p, r.psnr);
    max_p = std::max(max_p, r.psnr);
    min_s = std::min(min_s, r.ssim);
    max_s = std::max(max_s, r.ssim);
  }
  if (records.empty()) {
    min_bpp = 0; max_bpp = 1; min_p = 0; max_p = 1; min_s = 0; max_s = 1;
  }
  auto widen = [](double& lo, double& hi) {
    double pad = (hi - lo) * 0.05 + 1e-9;
    lo -= pad;
    hi += pad;
  };
  widen(min_bpp, max_bpp);
  widen(min_p, max_p);
  widen(min_s, max_s);

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='820' height='360' "
         "viewBox='0 0 820 360'>\n<rect width='820' height='360' "
         "fill='white'/>\n";
  detail::SvgPanel left{60, 30, 300, 270, min_bpp, max_bpp, min_p, max_p};
  detail::SvgPanel right{470, 30, 300, 270, min_bpp, max_bpp, min_s, max_s};
  detail::svg_panel(svg, left, records, true, "PSNR (dB)");
  detail::svg_panel(svg, right, records, false, "SSIM");
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vcn

#endif  // VCN_METRICS_HPP_
