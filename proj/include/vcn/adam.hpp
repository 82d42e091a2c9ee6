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

#ifndef VCN_ADAM_HPP_
#define VCN_ADAM_HPP_

#include <cmath>
#include <vector>

#include "vcn/tensor.hpp"

namespace vcn {

// Adam with bias correction (Kingma & Ba). Defaults: beta1=0.9,
// beta2=0.999, epsilon=1e-8, lr=1e-4.
template <typename T>
struct AdamState {
  std::vector<Tensor<T>> m1, m2;
  long step = 0;
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T epsilon = T(1e-8);
  T lr = T(1e-4);

  static AdamState init(const std::vector<Tensor<T>*>& params,
                        T lr = T(1e-4)) {
    AdamState s;
    s.lr = lr;
    for (const Tensor<T>* p : params) {
      s.m1.push_back(Tensor<T>::zeros(p->shape()));
      s.m2.push_back(Tensor<T>::zeros(p->shape()));
    }
    return s;
  }
};

// One update over a parameter group. Returns false (and updates nothing,
// not even the step counter) when any gradient is non-finite.
template <typename T>
bool adam_step(const std::vector<Tensor<T>*>& params,
               const std::vector<Tensor<T>>& grads, AdamState<T>& state) {
  check(params.size() == grads.size() && params.size() == state.m1.size(),
        "adam: parameter/gradient/state group size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    check(params[i]->same_shape(grads[i]),
          "adam: gradient shape mismatch at parameter " + std::to_string(i));
    if (!grads[i].all_finite()) return false;
  }
  state.step += 1;
  const T c1 = T(1) - std::pow(state.beta1, static_cast<T>(state.step));
  const T c2 = T(1) - std::pow(state.beta2, static_cast<T>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    const Tensor<T>& g = grads[i];
    Tensor<T>& m1 = state.m1[i];
    Tensor<T>& m2 = state.m2[i];
    for (std::int64_t j = 0; j < p.numel(); ++j) {
      m1[j] = state.beta1 * m1[j] + (T(1) - state.beta1) * g[j];
      m2[j] = state.beta2 * m2[j] + (T(1) - state.beta2) * g[j] * g[j];
      T mhat = m1[j] / c1;
      T vhat = m2[j] / c2;
      p[j] -= state.lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
  return true;
}

}  // namespace vcn

#endif  // VCN_ADAM_HPP_
