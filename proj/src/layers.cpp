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

#include "halp/layers.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "halp/errors.hpp"

namespace halp {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kDepthwiseConv:
      return "depthwise";
    case LayerKind::kPointwiseConv:
      return "pointwise";
    case LayerKind::kMaxPool:
      return "maxpool";
    case LayerKind::kGlobalAvgPool:
      return "global_avg_pool";
    case LayerKind::kFullyConnected:
      return "fully_connected";
  }
  return "unknown";
}

LayerKind layer_kind_from_string(std::string_view name) {
  for (LayerKind k :
       {LayerKind::kConv, LayerKind::kDepthwiseConv, LayerKind::kPointwiseConv,
        LayerKind::kMaxPool, LayerKind::kGlobalAvgPool,
        LayerKind::kFullyConnected}) {
    if (to_string(k) == name) return k;
  }
  throw ShapeError("unknown layer kind '" + std::string(name) + "'");
}

RowRange intersect(const RowRange& a, const RowRange& b) {
  RowRange r{std::max(a.begin, b.begin), std::min(a.end, b.end)};
  if (r.end < r.begin) r.end = r.begin;
  return r;
}

void LayerSpec::validate() const {
  if (in_channels < 1 || out_channels < 1) {
    throw ShapeError("layer channels must be >= 1");
  }
  if (stride != 1 && stride != 2) {
    throw ShapeError("stride must be 1 or 2, got " + std::to_string(stride));
  }
  switch (kind) {
    case LayerKind::kPointwiseConv:
      if (kernel_h != 1 || kernel_w != 1 || padding != 0 || stride != 1) {
        throw ShapeError("pointwise conv must be 1x1, stride 1, pad 0");
      }
      break;
    case LayerKind::kDepthwiseConv:
      if (out_channels != in_channels) {
        throw ShapeError("depthwise conv must keep the channel count");
      }
      break;
    case LayerKind::kMaxPool:
      if (kernel_h != 2 || kernel_w != 2 || stride != 2 || padding != 0 ||
          in_channels != out_channels) {
        throw ShapeError("max pool must be 2x2 stride 2");
      }
      break;
    default:
      break;
  }
}

LayerSpec make_conv(int in_ch, int out_ch, int stride) {
  return {LayerKind::kConv, 3, 3, stride, 1, in_ch, out_ch, Activation::kReLU};
}

LayerSpec make_depthwise(int channels, int stride) {
  return {LayerKind::kDepthwiseConv, 3,        3, stride, 1,
          channels,                  channels, Activation::kReLU};
}

LayerSpec make_pointwise(int in_ch, int out_ch) {
  return {LayerKind::kPointwiseConv, 1, 1, 1, 0, in_ch, out_ch,
          Activation::kReLU};
}

LayerSpec make_maxpool(int channels) {
  return {LayerKind::kMaxPool, 2, 2, 2, 0, channels, channels,
          Activation::kNone};
}

LayerSpec make_global_avg_pool(int channels) {
  return {LayerKind::kGlobalAvgPool, 1, 1, 1, 0, channels, channels,
          Activation::kNone};
}

LayerSpec make_fully_connected(int in_features, int out_features,
                               Activation act) {
  return {LayerKind::kFullyConnected, 1, 1, 1, 0, in_features, out_features,
          act};
}

std::size_t expected_kernel_size(const LayerSpec& spec) {
  const std::size_t kh = spec.kernel_h, kw = spec.kernel_w;
  switch (spec.kind) {
    case LayerKind::kConv:
    case LayerKind::kPointwiseConv:
      return kh * kw * spec.in_channels * spec.out_channels;
    case LayerKind::kDepthwiseConv:
      return kh * kw * spec.in_channels;
    case LayerKind::kFullyConnected:
      return static_cast<std::size_t>(spec.in_channels) * spec.out_channels;
    default:
      return 0;
  }
}

LayerWeights random_weights(const LayerSpec& spec, std::uint64_t seed) {
  LayerWeights w;
  if (!spec.has_weights()) return w;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-0.5f, 0.5f);
  w.kernel.resize(expected_kernel_size(spec));
  for (float& v : w.kernel) v = dist(rng);
  w.bias.resize(spec.out_channels);
  for (float& v : w.bias) v = dist(rng);
  return w;
}

LayerWeights zero_weights(const LayerSpec& spec) {
  LayerWeights w;
  if (!spec.has_weights()) return w;
  w.kernel.assign(expected_kernel_size(spec), 0.0f);
  w.bias.assign(spec.out_channels, 0.0f);
  return w;
}

void check_weights(const LayerSpec& spec, const LayerWeights& weights) {
  if (!spec.has_weights()) return;
  if (weights.kernel.size() != expected_kernel_size(spec)) {
    throw ShapeError("kernel has " + std::to_string(weights.kernel.size()) +
                     " values, layer expects " +
                     std::to_string(expected_kernel_size(spec)));
  }
  if (weights.bias.size() != static_cast<std::size_t>(spec.out_channels)) {
    throw ShapeError("bias has " + std::to_string(weights.bias.size()) +
                     " values, layer expects " +
                     std::to_string(spec.out_channels));
  }
}

}  // namespace halp
