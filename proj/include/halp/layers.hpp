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

#ifndef HALP_LAYERS_HPP_
#define HALP_LAYERS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "halp/tensor.hpp"

namespace halp {

enum class LayerKind {
  kConv,
  kDepthwiseConv,
  kPointwiseConv,
  kMaxPool,
  kGlobalAvgPool,
  kFullyConnected,
};

enum class Activation { kNone, kReLU };

std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

// Half-open row interval [begin, end).
struct RowRange {
  int begin = 0;
  int end = 0;

  int size() const { return end > begin ? end - begin : 0; }
  bool empty() const { return end <= begin; }
  bool contains(int row) const { return row >= begin && row < end; }
  bool contains(const RowRange& o) const {
    return o.empty() || (o.begin >= begin && o.end <= end);
  }
  bool operator==(const RowRange&) const = default;
};

RowRange intersect(const RowRange& a, const RowRange& b);

struct LayerSpec {
  LayerKind kind = LayerKind::kConv;
  int kernel_h = 1;
  int kernel_w = 1;
  int stride = 1;
  int padding = 0;
  int in_channels = 0;
  int out_channels = 0;
  Activation activation = Activation::kNone;

  // True for layers that work on rows of a spatial feature map and can be
  // split by rows across devices.
  bool is_spatial() const {
    return kind == LayerKind::kConv || kind == LayerKind::kDepthwiseConv ||
           kind == LayerKind::kPointwiseConv || kind == LayerKind::kMaxPool;
  }
  bool has_weights() const {
    return kind == LayerKind::kConv || kind == LayerKind::kDepthwiseConv ||
           kind == LayerKind::kPointwiseConv ||
           kind == LayerKind::kFullyConnected;
  }

  int output_extent(int input_extent) const {
    return (input_extent + 2 * padding - kernel_h) / stride + 1;
  }

  // Throws ShapeError when the spec breaks the per-kind invariants.
  void validate() const;

  bool operator==(const LayerSpec&) const = default;
};

LayerSpec make_conv(int in_ch, int out_ch, int stride = 1);
LayerSpec make_depthwise(int channels, int stride);
LayerSpec make_pointwise(int in_ch, int out_ch);
LayerSpec make_maxpool(int channels);
LayerSpec make_global_avg_pool(int channels);
LayerSpec make_fully_connected(int in_features, int out_features,
                               Activation act = Activation::kNone);

// Kernel laid out (kh, kw, Cin, Cout) for Conv/Pointwise, (kh, kw, C) for
// depthwise and (Cout, Cin) for fully-connected layers.
struct LayerWeights {
  std::vector<float> kernel;
  std::vector<float> bias;
};

std::size_t expected_kernel_size(const LayerSpec& spec);

// Uniform [-0.5, 0.5] weights from a seeded generator.
LayerWeights random_weights(const LayerSpec& spec, std::uint64_t seed);
LayerWeights zero_weights(const LayerSpec& spec);

void check_weights(const LayerSpec& spec, const LayerWeights& weights);

}  // namespace halp

#endif  // HALP_LAYERS_HPP_
