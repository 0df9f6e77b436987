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

#include "halp/model_zoo.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "halp/errors.hpp"

namespace halp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

int ModelSpec::trunk_size() const {
  int n = 0;
  while (n < static_cast<int>(layers.size()) && layers[n].is_spatial()) ++n;
  return n;
}

std::vector<FeatureShape> ModelSpec::shapes() const {
  std::vector<FeatureShape> out;
  out.reserve(layers.size() + 1);
  FeatureShape cur = input;
  out.push_back(cur);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    l.validate();
    const int expect_in = l.kind == LayerKind::kFullyConnected
                              ? cur.height * cur.width * cur.channels
                              : cur.channels;
    if (l.in_channels != expect_in) {
      throw ShapeError("layer " + std::to_string(i) + " expects " +
                       std::to_string(l.in_channels) + " inputs, gets " +
                       std::to_string(expect_in));
    }
    switch (l.kind) {
      case LayerKind::kGlobalAvgPool:
        cur = {1, 1, l.out_channels};
        break;
      case LayerKind::kFullyConnected:
        cur = {1, 1, l.out_channels};
        break;
      case LayerKind::kMaxPool:
        if (cur.height % 2 != 0 || cur.width % 2 != 0) {
          throw ShapeError("max pool on odd feature map at layer " +
                           std::to_string(i));
        }
        [[fallthrough]];
      default:
        cur = {l.output_extent(cur.height),
               (cur.width + 2 * l.padding - l.kernel_w) / l.stride + 1,
               l.out_channels};
        break;
    }
    if (cur.height < 1 || cur.width < 1) {
      throw ShapeError("layer " + std::to_string(i) + " output is empty");
    }
    out.push_back(cur);
  }
  return out;
}

void ModelSpec::validate() const {
  if (input.height < 1 || input.width < 1 || input.channels < 1) {
    throw ShapeError("model input must be non-empty");
  }
  (void)shapes();
}

int scale_channels(double alpha, int base) {
  const int c = static_cast<int>(std::floor(alpha * base + 0.5));
  return c < 1 ? 1 : c;
}

const std::vector<double>& supported_alphas() {
  static const std::vector<double> kAlphas = {1.0, 0.75, 0.5, 0.25};
  return kAlphas;
}

const std::vector<int>& supported_resolutions() {
  static const std::vector<int> kRhos = {224, 192, 160};
  return kRhos;
}

std::string mobilenet_name(double alpha, int rho) {
  char buf[64];
  if (alpha == 1.0) {
    std::snprintf(buf, sizeof buf, "MobileNet_v1_1.0_%d", rho);
  } else {
    std::snprintf(buf, sizeof buf, "MobileNet_v1_%.2f_%d", alpha, rho);
  }
  return buf;
}

ModelSpec build_vgg16(int base_width, int num_classes) {
  if (base_width < 1 || num_classes < 1) {
    throw std::invalid_argument("VGG-16 base width and classes must be >= 1");
  }
  ModelSpec m;
  m.name = base_width == kVggBaseWidth
               ? "VGG-16"
               : "VGG-16/w" + std::to_string(base_width);
  m.family = ModelFamily::kVgg16;
  m.input = {224, 224, 3};
  m.base_width = base_width;
  m.num_classes = num_classes;
  const int convs_per_block[5] = {2, 2, 3, 3, 3};
  const int widths[5] = {1, 2, 4, 8, 8};
  int ch = 3;
  for (int b = 0; b < 5; ++b) {
    const int out = base_width * widths[b];
    for (int i = 0; i < convs_per_block[b]; ++i) {
      m.layers.push_back(make_conv(ch, out));
      ch = out;
    }
    m.layers.push_back(make_maxpool(ch));
  }
  m.layers.push_back(make_fully_connected(7 * 7 * ch, num_classes));
  return m;
}

ModelSpec build_mobilenet_v1(double alpha, int rho, int num_classes) {
  bool alpha_ok = false;
  for (double a : supported_alphas()) alpha_ok |= (a == alpha);
  bool rho_ok = false;
  for (int r : supported_resolutions()) rho_ok |= (r == rho);
  if (!alpha_ok || !rho_ok) {
    throw std::invalid_argument("unsupported MobileNet-V1 variant alpha=" +
                                std::to_string(alpha) +
                                " rho=" + std::to_string(rho));
  }
  if (num_classes < 1) throw std::invalid_argument("classes must be >= 1");
  ModelSpec m;
  m.name = mobilenet_name(alpha, rho);
  m.family = ModelFamily::kMobileNetV1;
  m.input = {rho, rho, 3};
  m.alpha = alpha;
  m.rho = rho;
  m.base_width = 32;
  m.num_classes = num_classes;

  int ch = scale_channels(alpha, 32);
  m.layers.push_back(make_conv(3, ch, 2));
  struct Stage {
    int out;
    int stride;
  };
  static const Stage kStages[] = {{64, 1},  {128, 2}, {128, 1}, {256, 2},
                                  {256, 1}, {512, 2}, {512, 1}, {512, 1},
                                  {512, 1}, {512, 1}, {512, 1}, {1024, 2},
                                  {1024, 1}};
  for (const Stage& s : kStages) {
    m.layers.push_back(make_depthwise(ch, s.stride));
    const int out = scale_channels(alpha, s.out);
    m.layers.push_back(make_pointwise(ch, out));
    ch = out;
  }
  m.layers.push_back(make_global_avg_pool(ch));
  m.layers.push_back(make_fully_connected(ch, num_classes));
  return m;
}

std::vector<ModelSpec> mobilenet_variants(int num_classes) {
  std::vector<ModelSpec> out;
  for (double a : supported_alphas()) {
    for (int r : supported_resolutions()) {
      out.push_back(build_mobilenet_v1(a, r, num_classes));
    }
  }
  return out;
}

std::int64_t macs_per_output_row(const LayerSpec& spec,
                                 const FeatureShape& in) {
  const std::int64_t out_w =
      spec.is_spatial()
          ? (in.width + 2 * spec.padding - spec.kernel_w) / spec.stride + 1
          : 1;
  switch (spec.kind) {
    case LayerKind::kConv:
    case LayerKind::kPointwiseConv:
      return std::int64_t{spec.kernel_h} * spec.kernel_w * spec.in_channels *
             spec.out_channels * out_w;
    case LayerKind::kDepthwiseConv:
      return std::int64_t{spec.kernel_h} * spec.kernel_w * spec.in_channels *
             out_w;
    case LayerKind::kFullyConnected:
      return std::int64_t{spec.in_channels} * spec.out_channels;
    default:
      return 0;
  }
}

MacCount count_macs(const ModelSpec& model) {
  MacCount mc;
  const auto shapes = model.shapes();
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& l = model.layers[i];
    const std::int64_t rows = l.is_spatial() ? shapes[i + 1].height : 1;
    const std::int64_t v = macs_per_output_row(l, shapes[i]) * rows;
    mc.per_layer.push_back(v);
    mc.total += v;
  }
  return mc;
}

ModelWeights make_weights(const ModelSpec& model, std::uint64_t seed) {
  ModelWeights w;
  w.reserve(model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    w.push_back(random_weights(model.layers[i], splitmix64(seed * 1000003ULL + i)));
  }
  return w;
}

ModelWeights make_zero_weights(const ModelSpec& model) {
  ModelWeights w;
  for (const LayerSpec& l : model.layers) w.push_back(zero_weights(l));
  return w;
}

Tensor make_input(const ModelSpec& model, std::uint64_t seed) {
  return random_tensor(model.input.height, model.input.width,
                       model.input.channels, splitmix64(~seed));
}

}  // namespace halp
