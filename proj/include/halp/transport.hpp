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

#ifndef HALP_TRANSPORT_HPP_
#define HALP_TRANSPORT_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "halp/frame.hpp"

namespace halp {

using Clock = std::chrono::steady_clock;

// Reliable, ordered, bidirectional frame channel between two nodes.
class Transport {
 public:
  virtual ~Transport() = default;
  // Throws TransportError when the channel is closed or broken.
  virtual void send(const Frame& frame) = 0;
  // Blocks until a frame arrives. Throws TimeoutError past `deadline` and
  // TransportError once the peer has closed and no frames remain.
  virtual Frame receive(Clock::time_point deadline) = 0;
  // Ends our direction of the channel; pending frames are still delivered.
  virtual void close() = 0;
  // Wakes any blocked receive() with a TransportError; used to tear down a
  // failed session.
  virtual void abort() = 0;
  // Total frames and payload bytes passed to send().
  std::uint64_t frames_sent() const { return frames_sent_; }
  std::uint64_t bytes_sent() const { return bytes_sent_; }

 protected:
  void count(const Frame& f) {
    ++frames_sent_;
    bytes_sent_ += f.wire_size();
  }

 private:
  std::uint64_t frames_sent_ = 0;
  std::uint64_t bytes_sent_ = 0;
};

// Two connected in-process endpoints. With a finite `mbps` each direction
// delivers frames no earlier than a FIFO link of that throughput would.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>>
make_inprocess_pair(double mbps = 0.0);

// TCP stream carrying serialized frames back to back.
std::unique_ptr<Transport> tcp_connect(const std::string& host, int port,
                                       Clock::time_point deadline);

class TcpListener {
 public:
  // Port 0 picks a free port.
  TcpListener(const std::string& bind_host, int port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  int port() const { return port_; }
  std::unique_ptr<Transport> accept(Clock::time_point deadline);

 private:
  int fd_ = -1;
  int port_ = 0;
};

// "host:port" with a numeric port.
std::pair<std::string, int> parse_address(const std::string& address);

}  // namespace halp

#endif  // HALP_TRANSPORT_HPP_
