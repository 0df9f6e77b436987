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

#include "halp/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "halp/errors.hpp"

namespace halp {
namespace {

// One direction of an in-process link.
struct Channel {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::pair<Clock::time_point, Frame>> queue;
  Clock::time_point link_free{};
  bool closed = false;
  bool aborted = false;  // reader side gave up
};

class InProcessTransport final : public Transport {
 public:
  InProcessTransport(std::shared_ptr<Channel> out, std::shared_ptr<Channel> in,
                     double mbps)
      : out_(std::move(out)), in_(std::move(in)), mbps_(mbps) {}
  ~InProcessTransport() override { close(); }

  void send(const Frame& frame) override {
    check_frame(frame);
    std::lock_guard<std::mutex> lock(out_->mu);
    if (out_->closed) throw TransportError("send on closed channel");
    Clock::time_point ready = Clock::now();
    if (mbps_ > 0) {
      const double secs = frame.wire_size() * 8.0 / (mbps_ * 1e6);
      const auto start = std::max(ready, out_->link_free);
      ready = start + std::chrono::duration_cast<Clock::duration>(
                          std::chrono::duration<double>(secs));
      out_->link_free = ready;
    }
    out_->queue.emplace_back(ready, frame);
    count(frame);
    out_->cv.notify_all();
  }

  Frame receive(Clock::time_point deadline) override {
    std::unique_lock<std::mutex> lock(in_->mu);
    for (;;) {
      if (in_->aborted) throw TransportError("channel aborted");
      if (!in_->queue.empty()) {
        const auto ready = in_->queue.front().first;
        if (ready <= Clock::now()) {
          Frame f = std::move(in_->queue.front().second);
          in_->queue.pop_front();
          return f;
        }
        if (ready > deadline) {
          in_->cv.wait_until(lock, deadline);
          if (Clock::now() >= deadline) throw TimeoutError("receive timed out");
          continue;
        }
        in_->cv.wait_until(lock, ready);
        continue;
      }
      if (in_->closed) throw TransportError("peer closed the channel");
      if (in_->cv.wait_until(lock, deadline) == std::cv_status::timeout &&
          in_->queue.empty() && !in_->closed) {
        throw TimeoutError("receive timed out");
      }
    }
  }

  void close() override {
    std::lock_guard<std::mutex> lock(out_->mu);
    out_->closed = true;
    out_->cv.notify_all();
  }

  void abort() override {
    close();
    std::lock_guard<std::mutex> lock(in_->mu);
    in_->aborted = true;
    in_->cv.notify_all();
  }

 private:
  std::shared_ptr<Channel> out_;
  std::shared_ptr<Channel> in_;
  double mbps_;
};

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return static_cast<int>(std::clamp<long long>(left.count(), 0, 1 << 30));
}

void wait_fd(int fd, short events, Clock::time_point deadline) {
  for (;;) {
    pollfd p{fd, events, 0};
    const int ms = remaining_ms(deadline);
    const int rc = ::poll(&p, 1, ms);
    if (rc > 0) return;
    if (rc == 0) throw TimeoutError("socket wait timed out");
    if (errno != EINTR) throw TransportError(std::string("poll: ") + std::strerror(errno));
  }
}

class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(const Frame& frame) override {
    const std::vector<std::uint8_t> bytes = serialize_frame(frame);
    std::size_t off = 0;
    while (off < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("send: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
    count(frame);
  }

  Frame receive(Clock::time_point deadline) override {
    std::uint8_t head[kFrameHeaderSize];
    read_exact(head, sizeof head, deadline);
    Frame f;
    f.header = decode_header(head);
    f.payload.resize(f.header.payload_floats());
    read_exact(reinterpret_cast<std::uint8_t*>(f.payload.data()),
               f.header.payload_bytes(), deadline);
    return f;
  }

  void close() override {
    if (!shut_) {
      ::shutdown(fd_, SHUT_WR);
      shut_ = true;
    }
  }

  void abort() override {
    ::shutdown(fd_, SHUT_RDWR);
    shut_ = true;
  }

 private:
  void read_exact(std::uint8_t* dst, std::size_t len, Clock::time_point deadline) {
    std::size_t off = 0;
    while (off < len) {
      wait_fd(fd_, POLLIN, deadline);
      const ssize_t n = ::recv(fd_, dst + off, len - off, 0);
      if (n == 0) throw TransportError("peer closed the connection");
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw TransportError(std::string("recv: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  int fd_;
  bool shut_ = false;
};

addrinfo* resolve(const std::string& host, int port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(),
                               service.c_str(), &hints, &res);
  if (rc != 0) {
    throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  return res;
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>>
make_inprocess_pair(double mbps) {
  auto ab = std::make_shared<Channel>();
  auto ba = std::make_shared<Channel>();
  return {std::make_unique<InProcessTransport>(ab, ba, mbps),
          std::make_unique<InProcessTransport>(ba, ab, mbps)};
}

std::unique_ptr<Transport> tcp_connect(const std::string& host, int port,
                                       Clock::time_point deadline) {
  std::string last_error = "no address";
  // Retry until the deadline so secondaries may start after the host.
  while (true) {
    addrinfo* res = resolve(host, port, false);
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        ::freeaddrinfo(res);
        return std::make_unique<TcpTransport>(fd);
      }
      last_error = std::strerror(errno);
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (Clock::now() + std::chrono::milliseconds(100) >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  throw TimeoutError("cannot connect to " + host + ":" + std::to_string(port) +
                     " (" + last_error + ")");
}

TcpListener::TcpListener(const std::string& bind_host, int port) {
  addrinfo* res = resolve(bind_host, port, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw TransportError(std::string("socket: ") + std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const int rc = ::bind(fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0 || ::listen(fd_, 4) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    throw TransportError("cannot listen on port " + std::to_string(port) + ": " + err);
  }
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept(Clock::time_point deadline) {
  wait_fd(fd_, POLLIN, deadline);
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw TransportError(std::string("accept: ") + std::strerror(errno));
  return std::make_unique<TcpTransport>(fd);
}

std::pair<std::string, int> parse_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size()) {
    throw std::invalid_argument("address must be host:port, got '" + address + "'");
  }
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad port in '" + address + "'");
  }
  if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
  return {address.substr(0, colon), port};
}

}  // namespace halp
