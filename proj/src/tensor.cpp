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

#include "halp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>

#include "halp/errors.hpp"

namespace halp {

Tensor::Tensor(int height, int width, int channels, int row_offset)
    : height_(height),
      width_(width),
      channels_(channels),
      row_offset_(row_offset) {
  if (height < 0 || width < 1 || channels < 1) {
    throw ShapeError("tensor dimensions must be positive, got " +
                     std::to_string(height) + "x" + std::to_string(width) +
                     "x" + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
}

Tensor::Tensor(int height, int width, int channels, std::vector<float> data,
               int row_offset)
    : height_(height),
      width_(width),
      channels_(channels),
      row_offset_(row_offset),
      data_(std::move(data)) {
  if (height < 0 || width < 1 || channels < 1) {
    throw ShapeError("tensor dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(height) + "x" +
                     std::to_string(width) + "x" + std::to_string(channels));
  }
}

std::span<const float> Tensor::row(int abs_row) const {
  const std::size_t stride = static_cast<std::size_t>(width_) * channels_;
  return {data_.data() + static_cast<std::size_t>(abs_row - row_offset_) * stride,
          stride};
}

std::span<float> Tensor::row(int abs_row) {
  const std::size_t stride = static_cast<std::size_t>(width_) * channels_;
  return {data_.data() + static_cast<std::size_t>(abs_row - row_offset_) * stride,
          stride};
}

Tensor Tensor::slice_rows(int begin, int end) const {
  if (begin < row_offset_ || end > row_end() || begin > end) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") outside band [" +
                     std::to_string(row_offset_) + ", " +
                     std::to_string(row_end()) + ")");
  }
  const std::size_t stride = static_cast<std::size_t>(width_) * channels_;
  std::vector<float> out(data_.begin() + (begin - row_offset_) * stride,
                         data_.begin() + (end - row_offset_) * stride);
  return Tensor(end - begin, width_, channels_, std::move(out), begin);
}

Tensor stitch_rows(std::span<const Tensor* const> bands) {
  std::vector<const Tensor*> live;
  for (const Tensor* b : bands) {
    if (b != nullptr && !b->empty()) live.push_back(b);
  }
  if (live.empty()) throw ShapeError("nothing to stitch");
  std::sort(live.begin(), live.end(), [](const Tensor* a, const Tensor* b) {
    return a->row_offset() < b->row_offset();
  });
  const int width = live.front()->width();
  const int channels = live.front()->channels();
  int begin = live.front()->row_offset();
  int end = begin;
  for (const Tensor* b : live) {
    if (b->width() != width || b->channels() != channels) {
      throw ShapeError("cannot stitch bands of different width/channels");
    }
    if (b->row_offset() > end) {
      throw ShapeError("gap between bands at row " + std::to_string(end));
    }
    end = std::max(end, b->row_end());
  }
  Tensor out(end - begin, width, channels, begin);
  for (const Tensor* b : live) {
    for (int r = b->row_offset(); r < b->row_end(); ++r) {
      auto src = b->row(r);
      std::memcpy(out.row(r).data(), src.data(), src.size_bytes());
    }
  }
  return out;
}

Tensor random_tensor(int height, int width, int channels,
                     unsigned long long seed, float lo, float hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> data(static_cast<std::size_t>(height) * width * channels);
  for (float& v : data) v = dist(rng);
  return Tensor(height, width, channels, std::move(data));
}

double max_relative_error(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    return std::numeric_limits<double>::infinity();
  }
  double max_diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(double(a[i]) - double(b[i])));
    scale = std::max(scale, std::abs(double(b[i])));
  }
  if (max_diff == 0.0) return 0.0;
  return max_diff / std::max(scale, std::numeric_limits<double>::min());
}

}  // namespace halp
