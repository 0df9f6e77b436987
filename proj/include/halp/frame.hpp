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

#ifndef HALP_FRAME_HPP_
#define HALP_FRAME_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace halp {

inline constexpr std::uint16_t kHandshakeLayer = 0xFFFF;
inline constexpr std::uint16_t kRawImageLayer = 0xFFFE;
// u16 layer_id, u8 sender, u16 row_start, u16 row_count, u16 width,
// u16 channels; all little-endian.
inline constexpr std::size_t kFrameHeaderSize = 11;

struct FrameHeader {
  std::uint16_t layer_id = 0;
  std::uint8_t sender = 0;
  std::uint16_t row_start = 0;
  std::uint16_t row_count = 0;
  std::uint16_t width = 0;
  std::uint16_t channels = 0;

  std::size_t payload_floats() const {
    return std::size_t{row_count} * width * channels;
  }
  std::size_t payload_bytes() const { return payload_floats() * 4; }
  bool operator==(const FrameHeader&) const = default;
};

struct Frame {
  FrameHeader header;
  std::vector<float> payload;

  std::size_t wire_size() const { return kFrameHeaderSize + payload.size() * 4; }
  bool operator==(const Frame&) const = default;
};

// Throws FrameError for zero rows, zero width/channels or a payload size that
// disagrees with the header.
void check_frame(const Frame& f);

std::array<std::uint8_t, kFrameHeaderSize> encode_header(const FrameHeader& h);
// Throws FrameError when the header describes an empty frame.
FrameHeader decode_header(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_frame(const Frame& f);
// Exactly one frame; trailing or missing bytes are an error.
Frame deserialize_frame(std::span<const std::uint8_t> bytes);

// Control frames carry UTF-8 text in the payload bytes, zero-padded to a
// multiple of four and laid out as one row of width bytes / 4.
Frame make_text_frame(std::uint16_t layer_id, std::uint8_t sender,
                      std::string_view text);
std::string frame_text(const Frame& f);

}  // namespace halp

#endif  // HALP_FRAME_HPP_
