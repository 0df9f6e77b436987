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

#include <gtest/gtest.h>

#include "halp/model_zoo.hpp"
#include "halp/runtime.hpp"
#include "halp/serialization.hpp"

namespace halp {
namespace {

std::vector<int> pool_heights(const ModelSpec& m) {
  std::vector<int> out;
  const auto shapes = m.shapes();
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    if (m.layers[i].kind == LayerKind::kMaxPool) out.push_back(shapes[i + 1].height);
  }
  return out;
}

TEST(Vgg16, BlockStructure) {
  const ModelSpec m = build_vgg16();
  EXPECT_EQ(pool_heights(m), (std::vector<int>{112, 56, 28, 14, 7}));
  EXPECT_EQ(m.layers.front().out_channels, 64);
  int convs = 0, pools = 0;
  for (const LayerSpec& l : m.layers) {
    if (l.kind == LayerKind::kConv) {
      ++convs;
      EXPECT_EQ(l.kernel_h, 3);
      EXPECT_EQ(l.stride, 1);
      EXPECT_EQ(l.padding, 1);
    }
    pools += l.kind == LayerKind::kMaxPool;
  }
  EXPECT_EQ(convs, 13);
  EXPECT_EQ(pools, 5);
  EXPECT_EQ(m.input, (FeatureShape{224, 224, 3}));
}

TEST(Vgg16, MacCountMatchesClosedForm) {
  struct Block {
    int convs, ch;
  };
  std::int64_t want = 0;
  int h = 224, cin = 3;
  for (Block b : {Block{2, 64}, {2, 128}, {3, 256}, {3, 512}, {3, 512}}) {
    for (int i = 0; i < b.convs; ++i) {
      want += std::int64_t{9} * cin * b.ch * h * h;
      cin = b.ch;
    }
    h /= 2;
  }
  EXPECT_EQ(want, 15346630656LL);
  want += std::int64_t{7} * 7 * 512 * 1000;
  const MacCount mc = count_macs(build_vgg16());
  EXPECT_EQ(mc.total, want);
  std::int64_t sum = 0;
  for (auto v : mc.per_layer) sum += v;
  EXPECT_EQ(sum, mc.total);
}

std::int64_t mobilenet_macs(double a, int r) {
  auto sc = [a](int c) { return std::max(1, static_cast<int>(a * c + 0.5)); };
  std::int64_t h = r / 2, ch = sc(32);
  std::int64_t t = 9 * 3 * ch * h * h;
  const int stages[][2] = {{64, 1},  {128, 2}, {128, 1}, {256, 2}, {256, 1},
                           {512, 2}, {512, 1}, {512, 1}, {512, 1}, {512, 1},
                           {512, 1}, {1024, 2}, {1024, 1}};
  for (const auto& s : stages) {
    h = (h + 2 - 3) / s[1] + 1;
    t += 9 * ch * h * h;
    const std::int64_t o = sc(s[0]);
    t += ch * o * h * h;
    ch = o;
  }
  return t + ch * 1000;
}

TEST(MobileNet, HeightsPerStage) {
  const ModelSpec m = build_mobilenet_v1(1.0, 224);
  const auto shapes = m.shapes();
  std::vector<int> heights;
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    const LayerKind k = m.layers[i].kind;
    if (k == LayerKind::kConv || k == LayerKind::kDepthwiseConv) heights.push_back(shapes[i + 1].height);
  }
  EXPECT_EQ(heights, (std::vector<int>{112, 112, 56, 56, 28, 28, 14, 14, 14, 14, 14, 14, 7, 7}));
}

TEST(MobileNet, StructureAndStrides) {
  const ModelSpec m = build_mobilenet_v1(0.75, 192);
  EXPECT_EQ(m.layers.size(), 1u + 26u + 2u);
  EXPECT_EQ(m.layers.front().stride, 2);
  std::vector<int> s2;
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    if (m.layers[i].kind == LayerKind::kDepthwiseConv && m.layers[i].stride == 2) s2.push_back(static_cast<int>(i));
  }
  EXPECT_EQ(s2, (std::vector<int>{3, 7, 11, 23}));
  EXPECT_EQ(m.layers[m.layers.size() - 2].kind, LayerKind::kGlobalAvgPool);
  EXPECT_EQ(m.layers.back().kind, LayerKind::kFullyConnected);
}

TEST(MobileNet, AlphaScalesChannels) {
  EXPECT_EQ(build_mobilenet_v1(0.25, 160).layers.front().out_channels, 8);
  EXPECT_EQ(scale_channels(0.75, 32), 24);
  EXPECT_EQ(scale_channels(0.25, 2), 1);  // round half up
  EXPECT_EQ(scale_channels(0.25, 1), 1);  // floor of one
}

TEST(MobileNet, MacCountsMatchClosedForm) {
  EXPECT_EQ(count_macs(build_mobilenet_v1(1.0, 224)).total, 568740352LL);
  for (const ModelSpec& m : mobilenet_variants()) {
    EXPECT_EQ(count_macs(m).total, mobilenet_macs(m.alpha, m.rho)) << m.name;
  }
}

TEST(MobileNet, MacsDecreaseWithAlphaAndRho) {
  const auto& alphas = supported_alphas();
  const auto& rhos = supported_resolutions();
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    for (int r : rhos)
      EXPECT_GT(count_macs(build_mobilenet_v1(alphas[i], r)).total,
                count_macs(build_mobilenet_v1(alphas[i + 1], r)).total);
  for (double a : alphas)
    for (std::size_t j = 0; j + 1 < rhos.size(); ++j)
      EXPECT_GT(count_macs(build_mobilenet_v1(a, rhos[j])).total,
                count_macs(build_mobilenet_v1(a, rhos[j + 1])).total);
}

TEST(MobileNet, UnsupportedVariantThrows) {
  EXPECT_THROW(build_mobilenet_v1(0.6, 224), std::invalid_argument);
  EXPECT_THROW(build_mobilenet_v1(1.0, 128), std::invalid_argument);
}

TEST(MobileNet, AllVariantsInferToClassVector) {
  for (const ModelSpec& m : mobilenet_variants(10)) {
    const auto out = monolithic_infer(m, make_weights(m, 1), make_input(m, 2));
    EXPECT_EQ(out.size(), 10u) << m.name;
  }
}

TEST(ModelJson, RoundTrip) {
  for (const ModelSpec& m : {build_vgg16(8, 10), build_mobilenet_v1(0.5, 192)}) {
    const ModelSpec back = model_from_json(to_json(m));
    EXPECT_EQ(back.name, m.name);
    EXPECT_EQ(back.layers, m.layers);
  }
  Json j = to_json(build_mobilenet_v1(0.5, 192));
  j["layers"][3]["stride"] = 1;
  EXPECT_ANY_THROW(model_from_json(j));
}

TEST(ModelJson, ResolveByName) {
  EXPECT_EQ(resolve_model("vgg16").name, "VGG-16");
  EXPECT_EQ(resolve_model("VGG-16", 1.0, 224, 8).name, "VGG-16/w8");
  EXPECT_EQ(resolve_model("mobilenet", 0.25, 160).name, "MobileNet_v1_0.25_160");
  EXPECT_EQ(resolve_model("MobileNet_v1_0.50_192").name, "MobileNet_v1_0.50_192");
  EXPECT_THROW(resolve_model("resnet"), std::invalid_argument);
}

}  // namespace
}  // namespace halp
