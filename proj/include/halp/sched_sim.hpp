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

#ifndef HALP_SCHED_SIM_HPP_
#define HALP_SCHED_SIM_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "halp/model_zoo.hpp"
#include "halp/partition.hpp"

namespace halp {

// Linear compute-time model of one device. A layer costs its MACs at
// `mac_rate` plus `layer_overhead_s`, of which `fixed_fraction` is paid once
// per device and layer regardless of rows and the rest is spread evenly over
// the layer's output rows.
struct TimingModel {
  double mac_rate = 1e9;  // MACs per second
  double layer_overhead_s = 0.0;
  double fixed_fraction = 1.0;
};

// Link throughput in Mbps (10^6 bits/s), either fixed or uniform in [lo, hi].
struct ChannelModel {
  double lo_mbps = 42.0;
  double hi_mbps = 42.0;

  static ChannelModel fixed(double mbps) { return {mbps, mbps}; }
  static ChannelModel uniform(double lo, double hi);
  bool is_fixed() const { return lo_mbps == hi_mbps; }
  double sample(std::mt19937_64& rng) const;
};

enum class IntervalKind { kCompute, kSend, kRecv, kIdle };
std::string_view to_string(IntervalKind k);

struct Interval {
  Device node = Device::kHost;
  IntervalKind kind = IntervalKind::kCompute;
  int layer = 0;  // trunk/head layer, or before_layer for transfers
  RowRange rows;
  Device peer = Device::kHost;  // other end of a transfer
  double start = 0.0;           // seconds
  double end = 0.0;
};

struct Timeline {
  std::vector<Interval> intervals;  // in scheduling order
  double makespan = 0.0;            // seconds
  double standalone = 0.0;          // seconds on one device

  double gain() const { return makespan > 0 ? standalone / makespan : 0.0; }
  std::vector<Interval> of(Device node, IntervalKind kind) const;
  // Total compute seconds assigned to `node`.
  double busy(Device node) const;
};

// Seconds for `rows` output rows of `layer` (input shape `in`). Head layers
// ignore `rows` when it is positive and always cost the whole layer.
// `include_fixed` controls whether the per-layer fixed overhead is charged.
double compute_time(const LayerSpec& layer, const FeatureShape& in, int rows,
                    const TimingModel& timing, bool include_fixed = true);

// Seconds to move rows x width x channels float32 values at `mbps`.
double transmit_time(int rows, int width, int channels, double mbps);

double standalone_time(const ModelSpec& model, const TimingModel& timing);

// Event-driven execution of the plan: every device computes its chunks in
// compute_order, each chunk waits for its receptive field, and each directed
// link carries frames FIFO at `mbps` (infinity allowed). Throws PlanError on
// a dependency cycle.
Timeline simulate(const PartitionPlan& plan, const ModelSpec& model,
                  const TimingModel& timing, double mbps);

std::string timeline_csv(const Timeline& t);

// Measured means used to fit the timing models.
struct ReferencePoint {
  std::string label;
  double measured_ms = 0.0;
  double model_ms = 0.0;
};

struct Calibration {
  TimingModel timing;
  std::vector<ReferencePoint> points;
  double max_relative_residual() const;
};

inline constexpr double kReferenceThroughputMbps = 42.0;

// VGG-16: rate pinned so the standalone time is 4905 ms; the per-layer
// overhead (fully fixed) is the least-squares fit of the simulated 112-4-112
// and 80-68-80 makespans to 3264 ms and 2864 ms.
Calibration calibrate_vgg16(const ModelSpec& vgg,
                            double mbps = kReferenceThroughputMbps);

// MobileNet-V1: rate and overhead are the least-squares fit of the twelve
// standalone times; the fixed fraction is then fit to the HALP times.
Calibration calibrate_mobilenet(double mbps = kReferenceThroughputMbps);

// Calibrated model for the family of `model` (computed once per family).
TimingModel calibrated_timing(const ModelSpec& model);

struct MobileNetReference {
  double alpha;
  int rho;
  double standalone_ms;
  double halp_ms;
};
const std::vector<MobileNetReference>& mobilenet_reference_times();

inline constexpr double kVggStandaloneMs = 4905.0;
inline constexpr double kVggDefaultMs = 3264.0;
inline constexpr double kVggOptimizedMs = 2864.0;

}  // namespace halp

#endif  // HALP_SCHED_SIM_HPP_
