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

#ifndef VCN_VCN_HPP_
#define VCN_VCN_HPP_

#include "vcn/adam.hpp"
#include "vcn/arith.hpp"
#include "vcn/autograd.hpp"
#include "vcn/checkpoint.hpp"
#include "vcn/codec.hpp"
#include "vcn/common.hpp"
#include "vcn/compress.hpp"
#include "vcn/conv.hpp"
#include "vcn/dataset.hpp"
#include "vcn/image.hpp"
#include "vcn/image_ops.hpp"
#include "vcn/losses.hpp"
#include "vcn/metrics.hpp"
#include "vcn/network.hpp"
#include "vcn/quantizer.hpp"
#include "vcn/tensor.hpp"
#include "vcn/trainer.hpp"

#endif  // VCN_VCN_HPP_
