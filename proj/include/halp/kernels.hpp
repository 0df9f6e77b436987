/* Copyright 2026 The HALP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HALP_KERNELS_HPP_
#define HALP_KERNELS_HPP_

#include <span>
#include <vector>

#include "halp/layers.hpp"
#include "halp/tensor.hpp"

namespace halp {

// Whole-tensor reference kernels. The input must start at row 0.
Tensor conv2d(const Tensor& input, const LayerSpec& spec,
              const LayerWeights& weights);
Tensor depthwise_conv2d(const Tensor& input, const LayerSpec& spec,
                        const LayerWeights& weights);
Tensor pointwise_conv2d(const Tensor& input, const LayerSpec& spec,
                        const LayerWeights& weights);
Tensor maxpool2d(const Tensor& input);
std::vector<float> global_avg_pool(const Tensor& input);
std::vector<float> fully_connected(std::span<const float> input,
                                   const LayerSpec& spec,
                                   const LayerWeights& weights);

// Computes output rows `out_rows` of a spatial layer whose full input has
// `input_height` rows. `band` holds some contiguous rows of that input and
// must contain every in-bounds row of the receptive field; rows outside
// [0, input_height) are zero padding. The result is a band whose row_offset
// is out_rows.begin.
//
// Every output element is accumulated in the same fixed order (kernel rows,
// kernel cols, input channels) regardless of which band it came from, so a
// row computed from a band is bit-identical to the same row computed from
// the full map.
Tensor compute_rows(const LayerSpec& spec, const LayerWeights& weights,
                    const Tensor& band, int input_height, RowRange out_rows);

// Input rows needed to produce output rows [out.begin, out.end) of a
// spatial layer, clamped to [0, input_height).
RowRange input_rows_for(const LayerSpec& spec, RowRange out, int input_height);

}  // namespace halp

#endif  // HALP_KERNELS_HPP_
