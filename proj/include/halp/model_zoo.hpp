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

#ifndef HALP_MODEL_ZOO_HPP_
#define HALP_MODEL_ZOO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "halp/layers.hpp"
#include "halp/tensor.hpp"

namespace halp {

enum class ModelFamily { kVgg16, kMobileNetV1 };

struct FeatureShape {
  int height = 0;
  int width = 0;
  int channels = 0;
  bool operator==(const FeatureShape&) const = default;
};

struct ModelSpec {
  std::string name;
  ModelFamily family = ModelFamily::kVgg16;
  FeatureShape input;
  std::vector<LayerSpec> layers;
  double alpha = 1.0;  // width multiplier
  int rho = 224;       // input resolution
  int base_width = 64;
  int num_classes = 1000;

  // Number of leading row-partitionable layers; the rest (pooling head and
  // classifier) run on the host after the merge.
  int trunk_size() const;
  // input_shapes()[i] is the input of layer i; the last entry is the model
  // output. Throws ShapeError if the channel chain is inconsistent.
  std::vector<FeatureShape> shapes() const;
  void validate() const;
};

using ModelWeights = std::vector<LayerWeights>;

struct MacCount {
  std::vector<std::int64_t> per_layer;
  std::int64_t total = 0;
};

inline constexpr int kVggBaseWidth = 64;
inline constexpr int kDefaultClasses = 1000;

ModelSpec build_vgg16(int base_width = kVggBaseWidth,
                      int num_classes = kDefaultClasses);
ModelSpec build_mobilenet_v1(double alpha, int rho,
                             int num_classes = kDefaultClasses);

// The twelve supported (alpha, rho) variants, largest first.
std::vector<ModelSpec> mobilenet_variants(int num_classes = kDefaultClasses);
const std::vector<double>& supported_alphas();
const std::vector<int>& supported_resolutions();

// round-half-up of alpha * base, at least 1.
int scale_channels(double alpha, int base);
std::string mobilenet_name(double alpha, int rho);

// Multiply-accumulates of one output row of a spatial layer, or of the whole
// layer for the head layers.
std::int64_t macs_per_output_row(const LayerSpec& spec, const FeatureShape& in);
MacCount count_macs(const ModelSpec& model);

ModelWeights make_weights(const ModelSpec& model, std::uint64_t seed);
ModelWeights make_zero_weights(const ModelSpec& model);
Tensor make_input(const ModelSpec& model, std::uint64_t seed);

}  // namespace halp

#endif  // HALP_MODEL_ZOO_HPP_
