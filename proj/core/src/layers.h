// Copyright 2026 The mayor-lab Authors. All Rights Reserved.
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

#ifndef MAYOR_SRC_LAYERS_H_
#define MAYOR_SRC_LAYERS_H_

#include <Eigen/Dense>

#include "mayor/mask_head.h"

namespace mayor::internal {

// Activations of a minibatch: one column per sample, each column a
// channel-major (CHW) flattening.
using Batch = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;

void LayerForward(const LayerSpec& layer, const double* params, bool relu, const Batch& in,
                  Batch& out, int jobs);

// `grad_out` is masked in place by the ReLU pattern of `out`. Parameter
// gradients are added to `grads`; `grad_in` may be null for the first layer.
void LayerBackward(const LayerSpec& layer, const double* params, bool relu, const Batch& in,
                   const Batch& out, Batch& grad_out, Batch* grad_in, double* grads, int jobs);

}  // namespace mayor::internal

#endif  // MAYOR_SRC_LAYERS_H_
