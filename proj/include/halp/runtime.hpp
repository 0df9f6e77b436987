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

#ifndef HALP_RUNTIME_HPP_
#define HALP_RUNTIME_HPP_

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "halp/model_zoo.hpp"
#include "halp/partition.hpp"
#include "halp/tensor.hpp"
#include "halp/transport.hpp"

namespace halp {

enum class OffloadChoice { kRawImage, kHalfTensor };
std::string_view to_string(OffloadChoice c);

// RawImage iff the encoded image is strictly smaller than the float32
// segment of rows x width x channels.
OffloadChoice offload_choice(std::int64_t image_size_bits, int segment_rows,
                             int width, int channels);

// Runs every layer on one node. Trunk layers use the same row kernel as the
// distributed path, so results are bit-identical to it.
std::vector<float> monolithic_infer(const ModelSpec& model,
                                    const ModelWeights& weights,
                                    const Tensor& input);
// Trunk output (the full final feature map) of a monolithic run.
Tensor monolithic_trunk(const ModelSpec& model, const ModelWeights& weights,
                        const Tensor& input);
// Pooling head and classifier applied to the merged trunk output.
std::vector<float> run_head(const ModelSpec& model, const ModelWeights& weights,
                            const Tensor& trunk_output);

enum class EventKind { kComputeStart, kComputeEnd, kSend, kRecv };
std::string_view to_string(EventKind k);

struct Event {
  std::int64_t t_ns = 0;
  Device node = Device::kHost;
  EventKind kind = EventKind::kComputeStart;
  int layer = 0;  // compute: trunk layer; send/recv: before_layer
  RowRange rows;
  Device peer = Device::kHost;
  bool operator==(const Event&) const = default;
};

// Append-only, thread-safe.
class EventLog {
 public:
  void append(const Event& e);
  std::vector<Event> events() const;
  void clear();
  // One JSON object per line.
  std::string to_jsonl() const;

 private:
  mutable std::mutex mu_;
  std::vector<Event> events_;
};

enum class ClockMode {
  kWall,     // nanoseconds since the session started
  kLogical,  // per-node event counter; makes logs reproducible
};

struct RunOptions {
  std::chrono::milliseconds timeout{30000};
  ClockMode clock = ClockMode::kWall;
  // With kRawImage the host ships the whole input to each secondary (one
  // frame with layer id 0xFFFE) in place of the before-layer-0 row steps.
  OffloadChoice offload = OffloadChoice::kHalfTensor;
  EventLog* log = nullptr;
};

// `peers` maps every device this node exchanges frames with to its link.
struct Peer {
  Device device;
  Transport* link;
};

std::vector<float> run_host(const ModelSpec& model, const ModelWeights& weights,
                            const PartitionPlan& plan, const Tensor& input,
                            const std::vector<Peer>& peers,
                            const RunOptions& options = {});

void run_secondary(Device role, const ModelSpec& model,
                   const ModelWeights& weights, const PartitionPlan& plan,
                   const std::vector<Peer>& peers,
                   const RunOptions& options = {});

struct DistributedResult {
  std::vector<float> output;
  // Per-node logs concatenated host, ED1, ED2.
  std::vector<Event> events;
  std::uint64_t data_frames = 0;  // frames sent, all nodes
  std::uint64_t bytes = 0;
};

// Three nodes on threads joined by in-process links; `mbps` > 0 rate-limits
// each link.
DistributedResult run_distributed_inprocess(const ModelSpec& model,
                                            const ModelWeights& weights,
                                            const PartitionPlan& plan,
                                            const Tensor& input,
                                            RunOptions options = {},
                                            double mbps = 0.0);

// Node configuration for multi-process runs.
struct NodeConfig {
  Device role = Device::kHost;
  std::string listen;      // secondaries: "host:port" to accept on
  std::string ed1, ed2;    // host: secondary addresses
  std::string model = "vgg16";
  double alpha = 1.0;
  int rho = 224;
  int base_width = kVggBaseWidth;
  int num_classes = kDefaultClasses;
  std::string plan_path;   // empty: default plan
  std::uint64_t seed = 0;
  std::int64_t timeout_ms = 30000;
  std::string event_log;   // JSONL path, optional
};
NodeConfig node_config_from_json(const std::string& json_text);

// Host side of a socket session: connects to both secondaries, sends the
// handshake (layer id 0xFFFF) with model, plan and weight seed, then runs.
std::vector<float> host_session(const ModelSpec& model, const PartitionPlan& plan,
                                std::uint64_t seed, const Tensor& input,
                                const std::string& ed1_address,
                                const std::string& ed2_address,
                                const RunOptions& options = {});

// Secondary side: accepts one host connection on `listen_address`, reads the
// handshake, rebuilds model and weights, and runs.
void secondary_session(Device role, const std::string& listen_address,
                       const RunOptions& options = {});
// Same, on an already bound listener.
void secondary_session(Device role, TcpListener& listener,
                       const RunOptions& options = {});

}  // namespace halp

#endif  // HALP_RUNTIME_HPP_
