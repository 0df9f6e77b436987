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

#include "halp/frame.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "halp/errors.hpp"

namespace halp {
namespace {

static_assert(std::endian::native == std::endian::little,
              "wire format assumes a little-endian host");

void put_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v & 0xFF);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void check_header(const FrameHeader& h) {
  if (h.row_count == 0) throw FrameError("frame has zero rows");
  if (h.width == 0 || h.channels == 0) throw FrameError("frame has zero width or channels");
}

}  // namespace

void check_frame(const Frame& f) {
  check_header(f.header);
  if (f.payload.size() != f.header.payload_floats()) {
    throw FrameError("payload holds " + std::to_string(f.payload.size()) +
                     " values, header says " +
                     std::to_string(f.header.payload_floats()));
  }
}

std::array<std::uint8_t, kFrameHeaderSize> encode_header(const FrameHeader& h) {
  std::array<std::uint8_t, kFrameHeaderSize> b{};
  put_u16(&b[0], h.layer_id);
  b[2] = h.sender;
  put_u16(&b[3], h.row_start);
  put_u16(&b[5], h.row_count);
  put_u16(&b[7], h.width);
  put_u16(&b[9], h.channels);
  return b;
}

FrameHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderSize) throw FrameError("truncated frame header");
  FrameHeader h;
  h.layer_id = get_u16(&bytes[0]);
  h.sender = bytes[2];
  h.row_start = get_u16(&bytes[3]);
  h.row_count = get_u16(&bytes[5]);
  h.width = get_u16(&bytes[7]);
  h.channels = get_u16(&bytes[9]);
  check_header(h);
  return h;
}

std::vector<std::uint8_t> serialize_frame(const Frame& f) {
  check_frame(f);
  std::vector<std::uint8_t> out(f.wire_size());
  const auto h = encode_header(f.header);
  std::memcpy(out.data(), h.data(), h.size());
  std::memcpy(out.data() + kFrameHeaderSize, f.payload.data(), f.payload.size() * 4);
  return out;
}

Frame deserialize_frame(std::span<const std::uint8_t> bytes) {
  Frame f;
  f.header = decode_header(bytes);
  const std::size_t want = f.header.payload_bytes();
  if (bytes.size() - kFrameHeaderSize != want) {
    throw FrameError("frame payload is " +
                     std::to_string(bytes.size() - kFrameHeaderSize) +
                     " bytes, header says " + std::to_string(want));
  }
  f.payload.resize(f.header.payload_floats());
  std::memcpy(f.payload.data(), bytes.data() + kFrameHeaderSize, want);
  return f;
}

Frame make_text_frame(std::uint16_t layer_id, std::uint8_t sender,
                      std::string_view text) {
  const std::size_t words = std::max<std::size_t>(1, (text.size() + 3) / 4);
  if (words > 0xFFFF) throw FrameError("control text too long");
  Frame f;
  f.header = {layer_id, sender, 0, 1, static_cast<std::uint16_t>(words), 1};
  f.payload.assign(words, 0.0f);
  std::memcpy(f.payload.data(), text.data(), text.size());
  return f;
}

std::string frame_text(const Frame& f) {
  std::string s(reinterpret_cast<const char*>(f.payload.data()),
                f.payload.size() * 4);
  const auto end = s.find('\0');
  if (end != std::string::npos) s.resize(end);
  return s;
}

}  // namespace halp
