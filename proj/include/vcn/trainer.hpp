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

#ifndef VCN_TRAINER_HPP_
#define VCN_TRAINER_HPP_

#include <chrono>
#include <fstream>
#include <iomanip>

#include "vcn/adam.hpp"
#include "vcn/checkpoint.hpp"
#include "vcn/codec.hpp"
#include "vcn/dataset.hpp"
#include "vcn/losses.hpp"
#include "vcn/network.hpp"
#include "vcn/quantizer.hpp"

namespace vcn {

struct TrainConfig {
  Framework framework = Framework::scic;
  ResolutionMode mode = ResolutionMode::full;
  int outer_iters = 1;        // K
  int idn_epochs = 2;         // p: epochs per IDN phase and per VCN phase
  int rsn_epochs = 2;         // q
  int final_idn_epochs = -1;  // defaults to p
  int pretrain_epochs = 2;
  int batch = 4;
  int qf = 10;       // SCIC rate knob
  int n_maps = 4;    // DNNC rate knob
  int beta = 64;     // DNNC quantization level bound
  std::uint64_t seed = 1;
  double lr = 1e-4;
  LossWeights weights;
  SsimParams ssim;
  bool augment = false;

  int final_epochs() const {
    return final_idn_epochs < 0 ? idn_epochs : final_idn_epochs;
  }
};

// Stepped schedule: the initial rate, halved once the step counter
// reaches 3/5 of the total, halved again at 4/5.
inline double lr_at(long step, long total_steps, double initial) {
  check(step >= 0 && step < total_steps, "lr_at: step outside schedule");
  if (5 * step >= 4 * total_steps) return initial / 4;
  if (5 * step >= 3 * total_steps) return initial / 2;
  return initial;
}

template <typename T>
struct Pipeline {
  TrainConfig cfg;
  Network<T> rsn, idn, vcn;
  QuantizerSpec qspec;  // frozen after autoencoder pretraining (DNNC)
};

struct TrainReport {
  struct Row {
    std::string event;
    int k = 0;
    std::string phase;
    long step = 0;
    double value = 0;
  };
  std::vector<Row> rows;
  double wallclock_sec = 0;
  double pretrain_val_l1 = 0;
  double final_val_l1 = 0;
  std::vector<double> vcn_val_before, vcn_val_after;  // per outer iteration

  void add(const std::string& event, int k, const std::string& phase,
           long step, double value) {
    rows.push_back(Row{event, k, phase, step, value});
  }

  void to_csv(const std::string& path) const {
    std::ofstream out(path);
    check(out.good(), "cannot open for writing: " + path);
    out << "event,k,phase,step,value\n";
    for (const Row& r : rows) {
      out << r.event << ',' << r.k << ',' << r.phase << ',' << r.step << ','
          << std::setprecision(6) << r.value << "\n";
    }
  }
};

namespace detail {

template <typename T>
std::uint32_t param_checksum(const Network<T>& net) {
  std::uint32_t c = 0;
  for (const Tensor<T>* p : net.params())
    c = crc32(p->data(), static_cast<std::size_t>(p->numel()) * sizeof(T), c);
  return c;
}

// The lossy channel for the current framework; never touches a tape.
template <typename T>
Tensor<T> channel(const Pipeline<T>& pipe, const Tensor<T>& y) {
  if (pipe.cfg.framework == Framework::scic)
    return g_map(y, pipe.cfg.qf);
  return quantize_dequantize(y, pipe.qspec);
}

template <typename T>
T mean_val_l1(const Pipeline<T>& pipe, const PatchSet<T>& val,
              bool through_vcn) {
  T acc = 0;
  for (const Tensor<T>& x : val.patches) {
    Tensor<T> y = forward_plain(pipe.rsn, x);
    if (through_vcn) {
      Tensor<T> z = channel(pipe, y);
      Tensor<T> i_dec = forward_plain(pipe.idn, z);
      Tensor<T> i_hat = forward_plain(pipe.vcn, y);
      acc += l1_data(i_hat, i_dec);
    } else {
      Tensor<T> z = channel(pipe, y);
      Tensor<T> i_dec = forward_plain(pipe.idn, z);
      acc += l1_data(i_dec, x);
    }
  }
  return acc / static_cast<T>(val.size());
}

}  // namespace detail

// Joint RSN+IDN training without quantization (a classical autoencoder),
// then the decoder parameters seed both IDN and VCN. DNNC additionally
// freezes the quantizer range on the pre-trained encoder's codes.
template <typename T>
Pipeline<T> pretrain_autoencoder(const TrainConfig& cfg,
                                 const PatchSet<T>& train,
                                 TrainReport* report = nullptr) {
  check(train.size() > 0, "pretrain: empty patch set");
  Pipeline<T> pipe;
  pipe.cfg = cfg;
  if (cfg.framework == Framework::scic) {
    pipe.rsn = build_rsn<T>(cfg.mode, cfg.seed * 31 + 1);
    pipe.idn = build_idn<T>(cfg.mode, cfg.seed * 31 + 2);
  } else {
    DnncAutoencoder<T> ae = build_dnnc<T>(cfg.n_maps, cfg.seed * 31 + 1);
    pipe.rsn = std::move(ae.encoder);
    pipe.idn = std::move(ae.decoder);
  }

  BatchPlan plan{cfg.batch, cfg.seed};
  Batcher<T> batcher(train, plan, cfg.augment);
  std::vector<Tensor<T>*> params = pipe.rsn.params();
  for (Tensor<T>* p : pipe.idn.params()) params.push_back(p);
  auto adam = AdamState<T>::init(params, static_cast<T>(cfg.lr));
  long total_steps =
      static_cast<long>(cfg.pretrain_epochs) * batcher.batches_per_epoch();
  long step = 0;
  T last = 0;
  for (int e = 0; e < cfg.pretrain_epochs; ++e) {
    for (std::int64_t b = 0; b < batcher.batches_per_epoch(); ++b) {
      Tensor<T> x = batcher.batch(e, b);
      Tape<T> tape;
      Var vx = tape.constant(x);
      ForwardVars<T> fr = forward(pipe.rsn, tape, vx, true);
      ForwardVars<T> fi = forward(pipe.idn, tape, fr.out, true);
      Var loss = idn_objective(tape, cfg.framework, fi.out, vx, cfg.weights);
      last = tape.val(loss).item();
      check(std::isfinite(static_cast<double>(last)),
            "pretrain: non-finite loss, aborting");
      tape.backward(loss);
      std::vector<Tensor<T>> grads;
      for (std::size_t i = 0; i < pipe.rsn.layers.size(); ++i) {
        grads.push_back(tape.grad(fr.weight_vars[i]));
        grads.push_back(tape.grad(fr.bias_vars[i]));
      }
      for (std::size_t i = 0; i < pipe.idn.layers.size(); ++i) {
        grads.push_back(tape.grad(fi.weight_vars[i]));
        grads.push_back(tape.grad(fi.bias_vars[i]));
      }
      adam.lr = static_cast<T>(lr_at(step, total_steps, cfg.lr));
      check(adam_step(params, grads, adam),
            "pretrain: non-finite gradient, aborting");
      if (report) report->add("pretrain_loss", 0, "pretrain", step,
                              static_cast<double>(last));
      ++step;
    }
  }

  // decoder seeds both IDN and VCN
  pipe.vcn = pipe.idn;
  pipe.vcn.name = "vcn";

  if (cfg.framework == Framework::dnnc) {
    std::vector<Tensor<T>> codes;
    for (const Tensor<T>& x : train.patches)
      codes.push_back(forward_plain(pipe.rsn, x));
    pipe.qspec = fit_range(codes, cfg.beta);
  }
  return pipe;
}

// The third sub-problem's gradient: X -> Y = f(X) -> I_hat = v(Y) with
// the virtual codec's parameters frozen; the loss reads I_hat against X
// (plus the DSSIM regularizer on s(Y) in SCIC). No gradient ever flows
// through g(.) or q(.): the channel is never on the tape.
template <typename T>
struct BridgeResult {
  T loss;
  std::vector<Tensor<T>> rsn_grads;   // aligned with rsn.params()
  std::vector<Tensor<T>> vcn_grads;   // zeros by contract (frozen)
};

template <typename T>
BridgeResult<T> gradient_bridge(const Tensor<T>& x, Pipeline<T>& pipe) {
  Tape<T> tape;
  Var vx = tape.constant(x);
  ForwardVars<T> fr = forward(pipe.rsn, tape, vx, true);
  ForwardVars<T> fv = forward(pipe.vcn, tape, fr.out, false);  // theta frozen
  Var loss = rsn_objective(tape, pipe.cfg.framework, pipe.cfg.mode, fv.out,
                           vx, fr.out, pipe.cfg.weights, pipe.cfg.ssim);
  BridgeResult<T> out;
  out.loss = tape.val(loss).item();
  tape.backward(loss);
  for (std::size_t i = 0; i < pipe.rsn.layers.size(); ++i) {
    out.rsn_grads.push_back(tape.grad(fr.weight_vars[i]));
    out.rsn_grads.push_back(tape.grad(fr.bias_vars[i]));
  }
  for (std::size_t i = 0; i < pipe.vcn.layers.size(); ++i) {
    out.vcn_grads.push_back(tape.grad(fv.weight_vars[i]));
    out.vcn_grads.push_back(tape.grad(fv.bias_vars[i]));
  }
  return out;
}

// Alternating optimization: per outer iteration, the re-sampled vectors
// are pushed through the real channel, then IDN, VCN, and RSN are updated
// in turn (each phase touching exactly one parameter set), with a final
// IDN refresh once the loop ends.
template <typename T>
TrainReport train(Pipeline<T>& pipe, const PatchSet<T>& train_set,
                  const PatchSet<T>& val_set) {
  const TrainConfig& cfg = pipe.cfg;
  TrainReport report;
  auto t0 = std::chrono::steady_clock::now();

  BatchPlan plan{cfg.batch, cfg.seed + 1};
  Batcher<T> batcher(train_set, plan, cfg.augment);
  const std::int64_t bpe = batcher.batches_per_epoch();

  auto idn_adam = AdamState<T>::init(pipe.idn.params(), static_cast<T>(cfg.lr));
  auto vcn_adam = AdamState<T>::init(pipe.vcn.params(), static_cast<T>(cfg.lr));
  auto rsn_adam = AdamState<T>::init(pipe.rsn.params(), static_cast<T>(cfg.lr));
  const long idn_total =
      (static_cast<long>(cfg.outer_iters) * cfg.idn_epochs +
       cfg.final_epochs()) * bpe;
  const long vcn_total = static_cast<long>(cfg.outer_iters) * cfg.idn_epochs * bpe;
  const long rsn_total = static_cast<long>(cfg.outer_iters) * cfg.rsn_epochs * bpe;
  long idn_step = 0, vcn_step = 0, rsn_step = 0;
  long epoch_counter = 0;

  report.pretrain_val_l1 =
      static_cast<double>(detail::mean_val_l1(pipe, val_set, false));
  report.add("val_l1_end_to_end", 0, "pretrain", 0, report.pretrain_val_l1);

  auto idn_phase_epoch = [&](int k, const char* phase, AdamState<T>& adam,
                             long& step, long total) {
    std::vector<Tensor<T>*> params = pipe.idn.params();
    for (std::int64_t b = 0; b < bpe; ++b) {
      Tensor<T> x = batcher.batch(epoch_counter, b);
      Tensor<T> y = forward_plain(pipe.rsn, x);
      Tensor<T> z = detail::channel(pipe, y);
      Tape<T> tape;
      Var vz = tape.constant(z);
      Var vx = tape.constant(x);
      ForwardVars<T> fi = forward(pipe.idn, tape, vz, true);
      Var loss = idn_objective(tape, cfg.framework, fi.out, vx, cfg.weights);
      T lv = tape.val(loss).item();
      check(std::isfinite(static_cast<double>(lv)),
            "train: non-finite IDN loss, aborting");
      tape.backward(loss);
      std::vector<Tensor<T>> grads;
      for (std::size_t i = 0; i < pipe.idn.layers.size(); ++i) {
        grads.push_back(tape.grad(fi.weight_vars[i]));
        grads.push_back(tape.grad(fi.bias_vars[i]));
      }
      adam.lr = static_cast<T>(lr_at(step, total, cfg.lr));
      check(adam_step(params, grads, adam),
            "train: non-finite IDN gradient, aborting");
      report.add("idn_loss", k, phase, step, static_cast<double>(lv));
      ++step;
    }
    ++epoch_counter;
  };

  for (int k = 1; k <= cfg.outer_iters; ++k) {
    std::uint32_t sum_rsn = detail::param_checksum(pipe.rsn);
    std::uint32_t sum_vcn = detail::param_checksum(pipe.vcn);

    // IDN phase: decode the channel output back toward the ground truth.
    for (int e = 0; e < cfg.idn_epochs; ++e)
      idn_phase_epoch(k, "idn", idn_adam, idn_step, idn_total);
    check(detail::param_checksum(pipe.rsn) == sum_rsn &&
              detail::param_checksum(pipe.vcn) == sum_vcn,
          "train: IDN phase touched a foreign parameter set");

    // VCN phase: mimic the channel+IDN composite from the re-sampled
    // vectors.
    std::uint32_t sum_idn = detail::param_checksum(pipe.idn);
    report.vcn_val_before.push_back(
        static_cast<double>(detail::mean_val_l1(pipe, val_set, true)));
    report.add("val_l1_vcn_fidelity", k, "vcn_before", vcn_step,
               report.vcn_val_before.back());
    for (int e = 0; e < cfg.idn_epochs; ++e) {
      std::vector<Tensor<T>*> params = pipe.vcn.params();
      for (std::int64_t b = 0; b < bpe; ++b) {
        Tensor<T> x = batcher.batch(epoch_counter, b);
        Tensor<T> y = forward_plain(pipe.rsn, x);
        Tensor<T> z = detail::channel(pipe, y);
        Tensor<T> i_dec = forward_plain(pipe.idn, z);
        Tape<T> tape;
        Var vy = tape.constant(y);
        Var vdec = tape.constant(i_dec);
        ForwardVars<T> fv = forward(pipe.vcn, tape, vy, true);
        Var loss = vcn_objective(tape, cfg.framework, cfg.mode, fv.out, vdec,
                                 cfg.weights, cfg.ssim);
        T lv = tape.val(loss).item();
        check(std::isfinite(static_cast<double>(lv)),
              "train: non-finite VCN loss, aborting");
        tape.backward(loss);
        std::vector<Tensor<T>> grads;
        for (std::size_t i = 0; i < pipe.vcn.layers.size(); ++i) {
          grads.push_back(tape.grad(fv.weight_vars[i]));
          grads.push_back(tape.grad(fv.bias_vars[i]));
        }
        vcn_adam.lr = static_cast<T>(lr_at(vcn_step, vcn_total, cfg.lr));
        check(adam_step(params, grads, vcn_adam),
              "train: non-finite VCN gradient, aborting");
        report.add("vcn_loss", k, "vcn", vcn_step, static_cast<double>(lv));
        ++vcn_step;
      }
      ++epoch_counter;
    }
    report.vcn_val_after.push_back(
        static_cast<double>(detail::mean_val_l1(pipe, val_set, true)));
    report.add("val_l1_vcn_fidelity", k, "vcn_after", vcn_step,
               report.vcn_val_after.back());
    check(detail::param_checksum(pipe.rsn) == sum_rsn &&
              detail::param_checksum(pipe.idn) == sum_idn,
          "train: VCN phase touched a foreign parameter set");

    // RSN phase: update alpha through the frozen virtual codec.
    sum_vcn = detail::param_checksum(pipe.vcn);
    for (int e = 0; e < cfg.rsn_epochs; ++e) {
      std::vector<Tensor<T>*> params = pipe.rsn.params();
      for (std::int64_t b = 0; b < bpe; ++b) {
        Tensor<T> x = batcher.batch(epoch_counter, b);
        BridgeResult<T> br = gradient_bridge(x, pipe);
        check(std::isfinite(static_cast<double>(br.loss)),
              "train: non-finite RSN loss, aborting");
        rsn_adam.lr = static_cast<T>(lr_at(rsn_step, rsn_total, cfg.lr));
        check(adam_step(params, br.rsn_grads, rsn_adam),
              "train: non-finite RSN gradient, aborting");
        report.add("rsn_loss", k, "rsn", rsn_step,
                   static_cast<double>(br.loss));
        ++rsn_step;
      }
      ++epoch_counter;
    }
    check(detail::param_checksum(pipe.idn) == sum_idn &&
              detail::param_checksum(pipe.vcn) == sum_vcn,
          "train: RSN phase touched a foreign parameter set");

    report.add("val_l1_end_to_end", k, "outer", idn_step,
               static_cast<double>(detail::mean_val_l1(pipe, val_set, false)));
  }

  // Final IDN refresh against the settled re-sampler.
  for (int e = 0; e < cfg.final_epochs(); ++e)
    idn_phase_epoch(cfg.outer_iters, "idn_final", idn_adam, idn_step,
                    idn_total);

  report.final_val_l1 =
      static_cast<double>(detail::mean_val_l1(pipe, val_set, false));
  report.add("val_l1_end_to_end", cfg.outer_iters, "final", idn_step,
             report.final_val_l1);
  report.wallclock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

// --- checkpoint packing ---

// Inference checkpoints carry alpha and gamma only; the virtual codec is
// a training-time artifact.
template <typename T>
NamedTensors pack_pipeline(const Pipeline<T>& pipe, bool include_vcn) {
  NamedTensors out;
  auto meta = [&](const std::string& name, double v) {
    out.emplace_back(name, Tensor<float>({1}, {static_cast<float>(v)}));
  };
  meta("meta.framework", pipe.cfg.framework == Framework::scic ? 0 : 1);
  meta("meta.mode", pipe.cfg.mode == ResolutionMode::full ? 0 : 1);
  meta("meta.qf", pipe.cfg.qf);
  meta("meta.n_maps", pipe.cfg.n_maps);
  if (pipe.cfg.framework == Framework::dnnc) {
    out.emplace_back("quant.range",
                     Tensor<float>({2}, {static_cast<float>(pipe.qspec.y_min),
                                         static_cast<float>(pipe.qspec.y_max)}));
    meta("quant.beta", pipe.qspec.beta);
  }
  pack_network(out, "rsn", pipe.rsn);
  pack_network(out, "idn", pipe.idn);
  if (include_vcn) pack_network(out, "vcn", pipe.vcn);
  return out;
}

template <typename T>
Pipeline<T> unpack_pipeline(const NamedTensors& in) {
  auto meta = [&](const std::string& name) -> double {
    for (const auto& [n, t] : in)
      if (n == name) return static_cast<double>(t[0]);
    fail("checkpoint: missing field " + name);
  };
  Pipeline<T> pipe;
  pipe.cfg.framework =
      meta("meta.framework") == 0 ? Framework::scic : Framework::dnnc;
  pipe.cfg.mode =
      meta("meta.mode") == 0 ? ResolutionMode::full : ResolutionMode::low;
  pipe.cfg.qf = static_cast<int>(meta("meta.qf"));
  pipe.cfg.n_maps = static_cast<int>(meta("meta.n_maps"));
  if (pipe.cfg.framework == Framework::scic) {
    pipe.rsn = build_rsn<T>(pipe.cfg.mode, 0);
    pipe.idn = build_idn<T>(pipe.cfg.mode, 0);
    pipe.vcn = build_vcn<T>(pipe.cfg.mode, 0);
  } else {
    DnncAutoencoder<T> ae = build_dnnc<T>(pipe.cfg.n_maps, 0);
    pipe.rsn = ae.encoder;
    pipe.idn = ae.decoder;
    pipe.vcn = ae.decoder;
    pipe.vcn.name = "vcn";
    pipe.qspec.beta = static_cast<int>(meta("quant.beta"));
    for (const auto& [n, t] : in)
      if (n == "quant.range") {
        pipe.qspec.y_min = t[0];
        pipe.qspec.y_max = t[1];
      }
  }
  unpack_network(in, "rsn", pipe.rsn);
  unpack_network(in, "idn", pipe.idn);
  if (checkpoint_has(in, "vcn.")) unpack_network(in, "vcn", pipe.vcn);
  return pipe;
}

}  // namespace vcn

#endif  // VCN_TRAINER_HPP_
