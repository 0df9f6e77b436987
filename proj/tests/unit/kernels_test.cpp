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

#include <algorithm>
#include <cmath>
#include <random>

#include "halp/errors.hpp"
#include "halp/kernels.hpp"

namespace halp {
namespace {

constexpr double kTol = 1e-5;

LayerSpec spec_of(LayerKind kind, int k, int stride, int pad, int cin, int cout,
                  Activation act) {
  LayerSpec s;
  s.kind = kind;
  s.kernel_h = s.kernel_w = k;
  s.stride = stride;
  s.padding = pad;
  s.in_channels = cin;
  s.out_channels = cout;
  s.activation = act;
  return s;
}

float in_at(const Tensor& t, int y, int x, int c) {
  if (y < 0 || y >= t.height() || x < 0 || x >= t.width()) return 0.0f;
  return t.at(y, x, c);
}

// Straight six-loop convolution, accumulated in double.
std::vector<float> oracle_conv(const Tensor& in, const LayerSpec& s,
                               const LayerWeights& w, int& oh, int& ow) {
  oh = (in.height() + 2 * s.padding - s.kernel_h) / s.stride + 1;
  ow = (in.width() + 2 * s.padding - s.kernel_w) / s.stride + 1;
  std::vector<float> out;
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int co = 0; co < s.out_channels; ++co) {
        double acc = w.bias[co];
        for (int ky = 0; ky < s.kernel_h; ++ky)
          for (int kx = 0; kx < s.kernel_w; ++kx)
            for (int ci = 0; ci < s.in_channels; ++ci) {
              const std::size_t wi =
                  ((static_cast<std::size_t>(ky) * s.kernel_w + kx) * s.in_channels + ci) *
                      s.out_channels + co;
              acc += double(w.kernel[wi]) *
                     in_at(in, y * s.stride - s.padding + ky, x * s.stride - s.padding + kx, ci);
            }
        if (s.activation == Activation::kReLU) acc = std::max(acc, 0.0);
        out.push_back(static_cast<float>(acc));
      }
  return out;
}

std::vector<float> oracle_depthwise(const Tensor& in, const LayerSpec& s,
                                    const LayerWeights& w, int& oh, int& ow) {
  oh = (in.height() + 2 * s.padding - s.kernel_h) / s.stride + 1;
  ow = (in.width() + 2 * s.padding - s.kernel_w) / s.stride + 1;
  const int c_n = s.in_channels;
  std::vector<float> out;
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int c = 0; c < c_n; ++c) {
        double acc = w.bias[c];
        for (int ky = 0; ky < s.kernel_h; ++ky)
          for (int kx = 0; kx < s.kernel_w; ++kx)
            acc += double(w.kernel[(ky * s.kernel_w + kx) * c_n + c]) *
                   in_at(in, y * s.stride - s.padding + ky, x * s.stride - s.padding + kx, c);
        if (s.activation == Activation::kReLU) acc = std::max(acc, 0.0);
        out.push_back(static_cast<float>(acc));
      }
  return out;
}

void expect_close(std::span<const float> got, const std::vector<float>& want) {
  ASSERT_EQ(got.size(), want.size());
  EXPECT_LE(max_relative_error(got, want), kTol);
}

TEST(Conv2d, ZeroInputGivesZeroOutput) {
  const LayerSpec s = spec_of(LayerKind::kConv, 3, 1, 1, 1, 1, Activation::kNone);
  LayerWeights w = random_weights(s, 3);
  w.bias = {0.0f};
  const Tensor out = conv2d(Tensor(5, 5, 1), s, w);
  EXPECT_EQ(out.height(), 5);
  EXPECT_EQ(out.width(), 5);
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Conv2d, OneByOneIdentity) {
  const LayerSpec s = spec_of(LayerKind::kConv, 1, 1, 0, 1, 1, Activation::kNone);
  const Tensor in = random_tensor(4, 4, 1, 11);
  const Tensor out = conv2d(in, s, {{1.0f}, {0.0f}});
  EXPECT_EQ(out, in);
}

TEST(Conv2d, MatchesNestedLoopOracle8x8) {
  const LayerSpec s = spec_of(LayerKind::kConv, 3, 1, 1, 3, 4, Activation::kNone);
  const Tensor in = random_tensor(8, 8, 3, 5);
  const LayerWeights w = random_weights(s, 6);
  int oh, ow;
  const auto want = oracle_conv(in, s, w, oh, ow);
  const Tensor got = conv2d(in, s, w);
  EXPECT_EQ(got.height(), oh);
  expect_close(got.data(), want);
}

TEST(Conv2d, RandomCasesMatchOracle) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 120; ++i) {
    const int k = std::uniform_int_distribution<int>(0, 1)(rng) ? 3 : 1;
    const int stride = std::uniform_int_distribution<int>(1, 2)(rng);
    const int pad = k == 3 ? std::uniform_int_distribution<int>(0, 1)(rng) : 0;
    const int h = std::uniform_int_distribution<int>(k, 11)(rng);
    const int w = std::uniform_int_distribution<int>(k, 11)(rng);
    const int cin = std::uniform_int_distribution<int>(1, 6)(rng);
    const int cout = std::uniform_int_distribution<int>(1, 6)(rng);
    const Activation act = i % 2 ? Activation::kReLU : Activation::kNone;
    const LayerSpec s = spec_of(LayerKind::kConv, k, stride, pad, cin, cout, act);
    const Tensor in = random_tensor(h, w, cin, 100 + i);
    const LayerWeights wt = random_weights(s, 500 + i);
    int oh, ow;
    const auto want = oracle_conv(in, s, wt, oh, ow);
    const Tensor got = conv2d(in, s, wt);
    ASSERT_EQ(got.height(), oh) << "case " << i;
    ASSERT_EQ(got.width(), ow) << "case " << i;
    expect_close(got.data(), want);
  }
}

TEST(Conv2d, ShapeMismatchThrows) {
  const LayerSpec s = spec_of(LayerKind::kConv, 3, 1, 1, 3, 4, Activation::kNone);
  EXPECT_THROW(conv2d(Tensor(6, 6, 2), s, random_weights(s, 1)), ShapeError);
  LayerWeights bad = random_weights(s, 1);
  bad.bias.pop_back();
  EXPECT_THROW(conv2d(Tensor(6, 6, 3), s, bad), ShapeError);
}

TEST(DepthwiseConv2d, ZeroInputGivesZeroOutput) {
  const LayerSpec s = make_depthwise(2, 1);
  LayerWeights w = random_weights(s, 4);
  std::fill(w.bias.begin(), w.bias.end(), 0.0f);
  const Tensor out = depthwise_conv2d(Tensor(6, 6, 2), s, w);
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
}

TEST(DepthwiseConv2d, CenterTapIsIdentity) {
  LayerSpec s = make_depthwise(2, 1);
  s.activation = Activation::kNone;
  LayerWeights w = zero_weights(s);
  w.kernel[(1 * 3 + 1) * 2 + 0] = 1.0f;
  w.kernel[(1 * 3 + 1) * 2 + 1] = 1.0f;
  const Tensor in = random_tensor(6, 6, 2, 9);
  EXPECT_EQ(depthwise_conv2d(in, s, w), in);
}

TEST(DepthwiseConv2d, Stride2MatchesOracle) {
  LayerSpec s = make_depthwise(4, 2);
  const Tensor in = random_tensor(7, 7, 4, 21);
  const LayerWeights w = random_weights(s, 22);
  int oh, ow;
  const auto want = oracle_depthwise(in, s, w, oh, ow);
  const Tensor got = depthwise_conv2d(in, s, w);
  EXPECT_EQ(got.height(), 4);
  EXPECT_EQ(oh, 4);
  expect_close(got.data(), want);
}

TEST(DepthwiseConv2d, RandomCasesMatchOracle) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 120; ++i) {
    const int stride = std::uniform_int_distribution<int>(1, 2)(rng);
    const int c = std::uniform_int_distribution<int>(1, 8)(rng);
    LayerSpec s = make_depthwise(c, stride);
    s.padding = std::uniform_int_distribution<int>(0, 1)(rng);
    s.activation = i % 3 ? Activation::kReLU : Activation::kNone;
    const int h = std::uniform_int_distribution<int>(3, 12)(rng);
    const int w = std::uniform_int_distribution<int>(3, 12)(rng);
    const Tensor in = random_tensor(h, w, c, 900 + i);
    const LayerWeights wt = random_weights(s, 1900 + i);
    int oh, ow;
    const auto want = oracle_depthwise(in, s, wt, oh, ow);
    const Tensor got = depthwise_conv2d(in, s, wt);
    ASSERT_EQ(got.height(), oh);
    ASSERT_EQ(got.width(), ow);
    expect_close(got.data(), want);
  }
}

TEST(PointwiseConv2d, RandomCasesMatchOracle) {
  std::mt19937_64 rng(78);
  for (int i = 0; i < 120; ++i) {
    const int cin = std::uniform_int_distribution<int>(1, 9)(rng);
    const int cout = std::uniform_int_distribution<int>(1, 9)(rng);
    const LayerSpec s = make_pointwise(cin, cout);
    const int h = std::uniform_int_distribution<int>(1, 9)(rng);
    const Tensor in = random_tensor(h, h + 1, cin, 3000 + i);
    const LayerWeights wt = random_weights(s, 4000 + i);
    int oh, ow;
    const auto want = oracle_conv(in, s, wt, oh, ow);
    const Tensor got = pointwise_conv2d(in, s, wt);
    ASSERT_EQ(got.height(), h);
    expect_close(got.data(), want);
  }
}

TEST(PointwiseConv2d, SpecInvariants) {
  LayerSpec s = make_pointwise(3, 4);
  EXPECT_NO_THROW(s.validate());
  s.padding = 1;
  EXPECT_THROW(s.validate(), ShapeError);
  LayerSpec d = make_depthwise(3, 1);
  d.out_channels = 4;
  EXPECT_THROW(d.validate(), ShapeError);
  LayerSpec c = make_conv(3, 4);
  c.stride = 3;
  EXPECT_THROW(c.validate(), ShapeError);
}

TEST(MaxPool2d, SingleWindow) {
  const Tensor out = maxpool2d(Tensor(2, 2, 1, {1, 2, 3, 4}));
  ASSERT_EQ(out.height(), 1);
  EXPECT_EQ(out.at(0, 0, 0), 4.0f);
}

TEST(MaxPool2d, ConstantField) {
  const Tensor out = maxpool2d(Tensor(6, 4, 2, std::vector<float>(48, 2.5f)));
  EXPECT_EQ(out.height(), 3);
  EXPECT_EQ(out.width(), 2);
  for (float v : out.data()) EXPECT_EQ(v, 2.5f);
}

TEST(MaxPool2d, RandomCasesMatchOracle) {
  std::mt19937_64 rng(79);
  for (int i = 0; i < 120; ++i) {
    const int h = 2 * std::uniform_int_distribution<int>(1, 6)(rng);
    const int w = 2 * std::uniform_int_distribution<int>(1, 6)(rng);
    const int c = std::uniform_int_distribution<int>(1, 5)(rng);
    const Tensor in = random_tensor(h, w, c, 5000 + i);
    const Tensor got = maxpool2d(in);
    ASSERT_EQ(got.height(), h / 2);
    for (int y = 0; y < h / 2; ++y)
      for (int x = 0; x < w / 2; ++x)
        for (int ch = 0; ch < c; ++ch) {
          const float m = std::max({in.at(2 * y, 2 * x, ch), in.at(2 * y, 2 * x + 1, ch),
                                    in.at(2 * y + 1, 2 * x, ch), in.at(2 * y + 1, 2 * x + 1, ch)});
          ASSERT_EQ(got.at(y, x, ch), m);
        }
  }
}

TEST(MaxPool2d, OddDimensionThrows) {
  EXPECT_THROW(maxpool2d(Tensor(3, 4, 1)), ShapeError);
  EXPECT_THROW(maxpool2d(Tensor(4, 5, 1)), ShapeError);
}

TEST(GlobalAvgPool, MatchesOracle) {
  const Tensor in = random_tensor(5, 3, 4, 31);
  const auto got = global_avg_pool(in);
  ASSERT_EQ(got.size(), 4u);
  for (int c = 0; c < 4; ++c) {
    double s = 0;
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 3; ++x) s += in.at(y, x, c);
    EXPECT_NEAR(got[c], s / 15.0, 1e-6);
  }
}

TEST(FullyConnected, ZeroInputGivesBias) {
  const LayerSpec s = make_fully_connected(6, 3);
  const LayerWeights w = random_weights(s, 8);
  const std::vector<float> zero(6, 0.0f);
  EXPECT_EQ(fully_connected(zero, s, w), w.bias);
}

TEST(FullyConnected, IdentityMatrix) {
  const LayerSpec s = make_fully_connected(5, 5);
  LayerWeights w = zero_weights(s);
  for (int i = 0; i < 5; ++i) w.kernel[i * 5 + i] = 1.0f;
  const std::vector<float> x{1, -2, 3, -4, 5};
  EXPECT_EQ(fully_connected(x, s, w), x);
}

TEST(FullyConnected, RandomCasesMatchOracle) {
  std::mt19937_64 rng(80);
  for (int i = 0; i < 120; ++i) {
    const int in_n = i == 0 ? 16 : std::uniform_int_distribution<int>(1, 40)(rng);
    const int out_n = i == 0 ? 8 : std::uniform_int_distribution<int>(1, 20)(rng);
    const LayerSpec s = make_fully_connected(in_n, out_n);
    const LayerWeights w = random_weights(s, 6000 + i);
    const Tensor x = random_tensor(1, 1, in_n, 7000 + i);
    std::vector<float> want;
    for (int o = 0; o < out_n; ++o) {
      double acc = w.bias[o];
      for (int k = 0; k < in_n; ++k) acc += double(w.kernel[o * in_n + k]) * x.data()[k];
      want.push_back(static_cast<float>(acc));
    }
    expect_close(fully_connected(x.data(), s, w), want);
  }
}

TEST(FullyConnected, DimensionMismatchThrows) {
  const LayerSpec s = make_fully_connected(4, 2);
  EXPECT_THROW(fully_connected(std::vector<float>(5), s, random_weights(s, 1)), ShapeError);
}

// Output row j must not move when input rows outside its window change.
void check_row_locality(const LayerSpec& s, int h) {
  const LayerWeights w = random_weights(s, 41);
  const Tensor base = random_tensor(h, 6, s.in_channels, 42);
  const Tensor ref = s.kind == LayerKind::kDepthwiseConv ? depthwise_conv2d(base, s, w)
                                                         : conv2d(base, s, w);
  for (int j = 0; j < ref.height(); ++j) {
    const int lo = j * s.stride - s.padding;
    const int hi = lo + s.kernel_h - 1;
    Tensor perturbed = base;
    for (int y = 0; y < h; ++y) {
      if (y >= lo && y <= hi) continue;
      for (float& v : perturbed.row(y)) v += 7.0f;
    }
    const Tensor out = s.kind == LayerKind::kDepthwiseConv ? depthwise_conv2d(perturbed, s, w)
                                                           : conv2d(perturbed, s, w);
    const auto a = ref.row(j);
    const auto b = out.row(j);
    ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin())) << "row " << j;
  }
}

TEST(RowLocality, Stride1Conv) { check_row_locality(make_conv(3, 4, 1), 10); }
TEST(RowLocality, Stride2Conv) { check_row_locality(make_conv(3, 4, 2), 11); }
TEST(RowLocality, Stride2Depthwise) { check_row_locality(make_depthwise(3, 2), 12); }

TEST(ComputeRows, BandMatchesFullMapBitForBit) {
  std::mt19937_64 rng(81);
  const std::vector<LayerSpec> specs = {make_conv(3, 5, 1), make_conv(3, 5, 2),
                                        make_depthwise(3, 1), make_depthwise(3, 2),
                                        make_pointwise(3, 4), make_maxpool(3)};
  for (const LayerSpec& s : specs) {
    const int h = 12;
    const Tensor in = random_tensor(h, 8, 3, 43);
    const LayerWeights w = s.has_weights() ? random_weights(s, 44) : LayerWeights{};
    const int oh = s.output_extent(h);
    const Tensor full = compute_rows(s, w, in, h, {0, oh});
    for (int t = 0; t < 20; ++t) {
      const int a = std::uniform_int_distribution<int>(0, oh - 1)(rng);
      const int b = std::uniform_int_distribution<int>(a + 1, oh)(rng);
      const RowRange rf = input_rows_for(s, {a, b}, h);
      const Tensor band = in.slice_rows(rf.begin, rf.end);
      const Tensor part = compute_rows(s, w, band, h, {a, b});
      EXPECT_EQ(part.row_offset(), a);
      for (int r = a; r < b; ++r) {
        const auto x = part.row(r);
        const auto y = full.row(r);
        ASSERT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
      }
    }
  }
}

TEST(ComputeRows, MissingInputRowThrows) {
  const LayerSpec s = make_conv(2, 2, 1);
  const Tensor in = random_tensor(10, 4, 2, 1);
  EXPECT_THROW(compute_rows(s, random_weights(s, 2), in.slice_rows(3, 5), 10, {3, 5}),
               ShapeError);
}

TEST(ComputeRows, EmptyRangeThrows) {
  EXPECT_ANY_THROW(input_rows_for(make_conv(2, 2, 1), {3, 3}, 10));
}

TEST(ShapeRule, AllStridePaddingCombinations) {
  for (int k : {1, 3})
    for (int stride : {1, 2})
      for (int pad = 0; pad <= (k == 3 ? 1 : 0); ++pad)
        for (int h = k; h <= 14; ++h) {
          const LayerSpec s = spec_of(LayerKind::kConv, k, stride, pad, 1, 1, Activation::kNone);
          const Tensor out = conv2d(Tensor(h, h, 1), s, zero_weights(s));
          EXPECT_EQ(out.height(), (h + 2 * pad - k) / stride + 1);
          EXPECT_EQ(out.width(), (h + 2 * pad - k) / stride + 1);
        }
}

}  // namespace
}  // namespace halp
