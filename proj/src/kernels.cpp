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

#include "halp/kernels.hpp"

#include <algorithm>
#include <string>

#include "halp/errors.hpp"

namespace halp {
namespace {

void require_rows(const Tensor& band, RowRange needed, int input_height) {
  needed = intersect(needed, {0, input_height});
  if (needed.empty()) return;
  if (!band.holds_row(needed.begin) || !band.holds_row(needed.end - 1)) {
    throw ShapeError("input band [" + std::to_string(band.row_offset()) + ", " +
                     std::to_string(band.row_end()) +
                     ") does not cover required rows [" +
                     std::to_string(needed.begin) + ", " +
                     std::to_string(needed.end) + ")");
  }
}

void finish(float* out, const float* acc, const std::vector<float>& bias,
            int n, Activation act) {
  for (int c = 0; c < n; ++c) {
    float v = acc[c] + bias[c];
    if (act == Activation::kReLU && v < 0.0f) v = 0.0f;
    out[c] = v;
  }
}

// Dense convolution (also used for 1x1 pointwise). Loop order per output
// element: kernel row, kernel col, input channel; vectorised across Cout.
void conv_rows(const LayerSpec& spec, const LayerWeights& w, const Tensor& in,
               int input_height, Tensor& out) {
  const int in_w = in.width();
  const int cin = spec.in_channels;
  const int cout = spec.out_channels;
  std::vector<float> acc(cout);
  for (int oy = out.row_offset(); oy < out.row_end(); ++oy) {
    for (int ox = 0; ox < out.width(); ++ox) {
      std::fill(acc.begin(), acc.end(), 0.0f);
      for (int ky = 0; ky < spec.kernel_h; ++ky) {
        const int iy = oy * spec.stride - spec.padding + ky;
        if (iy < 0 || iy >= input_height) continue;
        for (int kx = 0; kx < spec.kernel_w; ++kx) {
          const int ix = ox * spec.stride - spec.padding + kx;
          if (ix < 0 || ix >= in_w) continue;
          const float* x = in.pixel(iy, ix);
          const float* wk =
              w.kernel.data() +
              static_cast<std::size_t>((ky * spec.kernel_w + kx) * cin) * cout;
          for (int ci = 0; ci < cin; ++ci) {
            const float xv = x[ci];
            const float* wrow = wk + static_cast<std::size_t>(ci) * cout;
            for (int co = 0; co < cout; ++co) acc[co] += xv * wrow[co];
          }
        }
      }
      finish(out.pixel(oy, ox), acc.data(), w.bias, cout, spec.activation);
    }
  }
}

void depthwise_rows(const LayerSpec& spec, const LayerWeights& w,
                    const Tensor& in, int input_height, Tensor& out) {
  const int in_w = in.width();
  const int ch = spec.in_channels;
  std::vector<float> acc(ch);
  for (int oy = out.row_offset(); oy < out.row_end(); ++oy) {
    for (int ox = 0; ox < out.width(); ++ox) {
      std::fill(acc.begin(), acc.end(), 0.0f);
      for (int ky = 0; ky < spec.kernel_h; ++ky) {
        const int iy = oy * spec.stride - spec.padding + ky;
        if (iy < 0 || iy >= input_height) continue;
        for (int kx = 0; kx < spec.kernel_w; ++kx) {
          const int ix = ox * spec.stride - spec.padding + kx;
          if (ix < 0 || ix >= in_w) continue;
          const float* x = in.pixel(iy, ix);
          const float* wk =
              w.kernel.data() +
              static_cast<std::size_t>(ky * spec.kernel_w + kx) * ch;
          for (int c = 0; c < ch; ++c) acc[c] += x[c] * wk[c];
        }
      }
      finish(out.pixel(oy, ox), acc.data(), w.bias, ch, spec.activation);
    }
  }
}

void maxpool_rows(const Tensor& in, Tensor& out) {
  const int ch = in.channels();
  for (int oy = out.row_offset(); oy < out.row_end(); ++oy) {
    for (int ox = 0; ox < out.width(); ++ox) {
      float* o = out.pixel(oy, ox);
      const float* a = in.pixel(2 * oy, 2 * ox);
      for (int c = 0; c < ch; ++c) o[c] = a[c];
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const float* x = in.pixel(2 * oy + dy, 2 * ox + dx);
          for (int c = 0; c < ch; ++c) o[c] = std::max(o[c], x[c]);
        }
      }
    }
  }
}

Tensor whole(const Tensor& input, const LayerSpec& spec,
             const LayerWeights& weights) {
  if (input.row_offset() != 0) {
    throw ShapeError("whole-tensor kernels expect a tensor starting at row 0");
  }
  const int out_h = spec.output_extent(input.height());
  return compute_rows(spec, weights, input, input.height(), {0, out_h});
}

}  // namespace

RowRange input_rows_for(const LayerSpec& spec, RowRange out,
                        int input_height) {
  if (out.empty()) {
    throw ShapeError("receptive field of an empty row range");
  }
  const int begin = std::max(0, out.begin * spec.stride - spec.padding);
  const int end = std::min(
      input_height, (out.end - 1) * spec.stride - spec.padding + spec.kernel_h);
  return {begin, end};
}

Tensor compute_rows(const LayerSpec& spec, const LayerWeights& weights,
                    const Tensor& band, int input_height, RowRange out_rows) {
  spec.validate();
  check_weights(spec, weights);
  if (!spec.is_spatial()) {
    throw ShapeError("compute_rows needs a spatial layer, got " +
                     std::string(to_string(spec.kind)));
  }
  if (band.channels() != spec.in_channels) {
    throw ShapeError("input has " + std::to_string(band.channels()) +
                     " channels, layer expects " +
                     std::to_string(spec.in_channels));
  }
  if (spec.kind == LayerKind::kMaxPool &&
      (input_height % 2 != 0 || band.width() % 2 != 0)) {
    throw ShapeError("max pool needs even spatial dimensions, got " +
                     std::to_string(input_height) + "x" +
                     std::to_string(band.width()));
  }
  const int out_h = spec.output_extent(input_height);
  const int out_w = (band.width() + 2 * spec.padding - spec.kernel_w) /
                        spec.stride +
                    1;
  if (out_h < 1 || out_w < 1) throw ShapeError("layer output would be empty");
  if (out_rows.begin < 0 || out_rows.end > out_h || out_rows.empty()) {
    throw ShapeError("output rows [" + std::to_string(out_rows.begin) + ", " +
                     std::to_string(out_rows.end) + ") outside [0, " +
                     std::to_string(out_h) + ")");
  }
  require_rows(band, input_rows_for(spec, out_rows, input_height),
               input_height);

  Tensor out(out_rows.size(), out_w, spec.out_channels, out_rows.begin);
  switch (spec.kind) {
    case LayerKind::kConv:
    case LayerKind::kPointwiseConv:
      conv_rows(spec, weights, band, input_height, out);
      break;
    case LayerKind::kDepthwiseConv:
      depthwise_rows(spec, weights, band, input_height, out);
      break;
    case LayerKind::kMaxPool:
      maxpool_rows(band, out);
      break;
    default:
      break;
  }
  return out;
}

Tensor conv2d(const Tensor& input, const LayerSpec& spec,
              const LayerWeights& weights) {
  if (spec.kind != LayerKind::kConv) throw ShapeError("conv2d needs a Conv spec");
  return whole(input, spec, weights);
}

Tensor depthwise_conv2d(const Tensor& input, const LayerSpec& spec,
                        const LayerWeights& weights) {
  if (spec.kind != LayerKind::kDepthwiseConv) {
    throw ShapeError("depthwise_conv2d needs a DepthwiseConv spec");
  }
  return whole(input, spec, weights);
}

Tensor pointwise_conv2d(const Tensor& input, const LayerSpec& spec,
                        const LayerWeights& weights) {
  if (spec.kind != LayerKind::kPointwiseConv) {
    throw ShapeError("pointwise_conv2d needs a PointwiseConv spec");
  }
  return whole(input, spec, weights);
}

Tensor maxpool2d(const Tensor& input) {
  return whole(input, make_maxpool(input.channels()), {});
}

std::vector<float> global_avg_pool(const Tensor& input) {
  const int ch = input.channels();
  std::vector<float> sum(ch, 0.0f);
  for (int y = input.row_offset(); y < input.row_end(); ++y) {
    for (int x = 0; x < input.width(); ++x) {
      const float* p = input.pixel(y, x);
      for (int c = 0; c < ch; ++c) sum[c] += p[c];
    }
  }
  const float n = static_cast<float>(input.height()) * input.width();
  for (float& v : sum) v /= n;
  return sum;
}

std::vector<float> fully_connected(std::span<const float> input,
                                   const LayerSpec& spec,
                                   const LayerWeights& weights) {
  if (spec.kind != LayerKind::kFullyConnected) {
    throw ShapeError("fully_connected needs a FullyConnected spec");
  }
  check_weights(spec, weights);
  if (input.size() != static_cast<std::size_t>(spec.in_channels)) {
    throw ShapeError("fully-connected input has " +
                     std::to_string(input.size()) + " features, layer expects " +
                     std::to_string(spec.in_channels));
  }
  std::vector<float> out(spec.out_channels);
  for (int o = 0; o < spec.out_channels; ++o) {
    const float* w =
        weights.kernel.data() + static_cast<std::size_t>(o) * spec.in_channels;
    float acc = 0.0f;
    for (int i = 0; i < spec.in_channels; ++i) acc += input[i] * w[i];
    float v = acc + weights.bias[o];
    if (spec.activation == Activation::kReLU && v < 0.0f) v = 0.0f;
    out[o] = v;
  }
  return out;
}

}  // namespace halp
