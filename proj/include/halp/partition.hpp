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

#ifndef HALP_PARTITION_HPP_
#define HALP_PARTITION_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "halp/layers.hpp"
#include "halp/model_zoo.hpp"

namespace halp {

enum class Device : std::uint8_t { kHost = 0, kEd1 = 1, kEd2 = 2 };
inline constexpr int kNumDevices = 3;
inline constexpr std::array<Device, kNumDevices> kAllDevices = {
    Device::kHost, Device::kEd1, Device::kEd2};
inline constexpr std::array<Device, 2> kSecondaries = {Device::kEd1,
                                                       Device::kEd2};

std::string_view to_string(Device d);
Device device_from_string(std::string_view name);
inline int index_of(Device d) { return static_cast<int>(d); }

// Row assignment of one trunk layer. `output` ranges are the rows each
// device computes (disjoint, covering the output height); `input` ranges are
// the layer-input rows each device must hold to do so.
struct PlanLayer {
  int layer_index = 0;
  std::array<RowRange, kNumDevices> output{};
  std::array<RowRange, kNumDevices> input{};

  int host_rows() const { return input[0].size(); }
  int ed1_rows() const { return input[1].size(); }
  int ed2_rows() const { return input[2].size(); }
  const RowRange& output_of(Device d) const { return output[index_of(d)]; }
  const RowRange& input_of(Device d) const { return input[index_of(d)]; }
};

// One transfer of rows of the feature map that feeds `before_layer`.
// before_layer == 0 carries input-image rows from the host; before_layer ==
// trunk size carries a secondary's final rows to the host for the merge.
struct ExchangeStep {
  int before_layer = 0;
  Device sender = Device::kHost;
  Device receiver = Device::kEd1;
  RowRange rows;
  int channels = 0;
  bool operator==(const ExchangeStep&) const = default;
};

struct PartitionPlan {
  std::string model_name;
  int z1 = 0;  // host rows of the first VGG block; 0 for other models
  std::vector<PlanLayer> layers;
  std::vector<ExchangeStep> exchanges;

  int trunk_size() const { return static_cast<int>(layers.size()); }
  std::vector<ExchangeStep> steps_into(int before_layer, Device receiver) const;
  std::vector<ExchangeStep> steps_from(int before_layer, Device sender) const;
};

// Input rows needed for output rows [out.begin, out.end) of `spec` given an
// input of `input_height` rows. Throws PlanError for an empty or
// out-of-range request.
RowRange receptive_field(const LayerSpec& spec, RowRange out, int input_height);

// z_i = z_{i-1} / 2 + 2 for the host overlap zone across a 2x2 pool.
int overlap_recurrence(int z_prev);

// Host rows per VGG block obtained by iterating the recurrence from z1.
// Throws PlanError when an intermediate value is odd.
std::vector<int> vgg_block_host_rows(int z1, int blocks = 5);

// Builds a plan from explicit host output ranges (one per trunk layer); the
// secondaries take the rows above (ED1) and below (ED2). Input ranges and the
// exchange schedule are derived from receptive fields.
PartitionPlan plan_from_host_rows(const ModelSpec& model,
                                  const std::vector<RowRange>& host_output,
                                  int z1 = 0);

PartitionPlan build_plan_vgg(const ModelSpec& model, int z1);
PartitionPlan build_plan_mobilenet(const ModelSpec& model);
// Default plan for any zoo model (z1 = 4 for VGG).
PartitionPlan build_default_plan(const ModelSpec& model);

// Even z1 values in [4, input height / 2] that yield a buildable VGG plan.
std::vector<int> feasible_vgg_z1(const ModelSpec& model);

// Human-readable violations; empty iff the plan is executable for `model`.
std::vector<std::string> validate_plan(const PartitionPlan& plan,
                                       const ModelSpec& model);

// Order in which `device` computes its rows of trunk layer `layer`: rows
// other devices are waiting for come first, one chunk per outgoing step,
// then the remainder top to bottom.
std::vector<RowRange> compute_order(const PartitionPlan& plan, Device device,
                                    int layer);

// Rows per device, one line per VGG block or per MobileNet 3x3 layer (runs
// of identical layers are folded into one "xN" line).
std::string render_plan_table(const PartitionPlan& plan,
                              const ModelSpec& model);

struct TimingModel;
struct ChannelModel;

// Exhaustive search over feasible z1 for the plan with the smallest simulated
// makespan at the given throughput; ties go to the smaller z1. Non-VGG models
// have a single candidate.
PartitionPlan optimize_plan(const ModelSpec& model, const TimingModel& timing,
                            double throughput_mbps);

}  // namespace halp

#endif  // HALP_PARTITION_HPP_
