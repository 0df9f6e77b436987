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

#ifndef HALP_TENSOR_HPP_
#define HALP_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace halp {

/// Dense H x W x C float32 feature map stored row-major in (H, W, C) order.
///
/// A tensor may also hold a horizontal band of a larger feature map; in that
/// case `row_offset()` is the absolute index of its first row. Kernels address
/// rows in absolute coordinates so that a band and the full map produce the
/// same values for the same output row.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int height, int width, int channels, int row_offset = 0);
  Tensor(int height, int width, int channels, std::vector<float> data,
         int row_offset = 0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  int row_offset() const { return row_offset_; }
  // One past the last absolute row held.
  int row_end() const { return row_offset_ + height_; }
  bool empty() const { return height_ == 0; }
  std::size_t size() const { return data_.size(); }

  bool holds_row(int abs_row) const {
    return abs_row >= row_offset_ && abs_row < row_end();
  }

  float& at(int abs_row, int col, int ch) {
    return data_[index(abs_row, col, ch)];
  }
  float at(int abs_row, int col, int ch) const {
    return data_[index(abs_row, col, ch)];
  }

  // Pointer to the first channel of (abs_row, col).
  const float* pixel(int abs_row, int col) const {
    return data_.data() + index(abs_row, col, 0);
  }
  float* pixel(int abs_row, int col) {
    return data_.data() + index(abs_row, col, 0);
  }

  std::span<const float> row(int abs_row) const;
  std::span<float> row(int abs_row);

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }
  std::vector<float> release() && { return std::move(data_); }

  // Copies absolute rows [begin, end) into a new band.
  Tensor slice_rows(int begin, int end) const;

  bool operator==(const Tensor& other) const = default;

 private:
  std::size_t index(int abs_row, int col, int ch) const {
    return (static_cast<std::size_t>(abs_row - row_offset_) * width_ + col) *
               channels_ +
           ch;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  int row_offset_ = 0;
  std::vector<float> data_;
};

// Stitches bands of the same feature map into one contiguous band. Bands may
// overlap (overlapping rows must agree); a gap between them is an error.
Tensor stitch_rows(std::span<const Tensor* const> bands);

// Seeded tensor with values uniform in [lo, hi].
Tensor random_tensor(int height, int width, int channels, unsigned long long seed,
                     float lo = -0.5f, float hi = 0.5f);

// max_i |a_i - b_i| / max(max_i |b_i|, tiny); 0 when identical.
double max_relative_error(std::span<const float> a, std::span<const float> b);

}  // namespace halp

#endif  // HALP_TENSOR_HPP_
