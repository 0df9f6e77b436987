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

#ifndef HALP_SERIALIZATION_HPP_
#define HALP_SERIALIZATION_HPP_

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "halp/model_zoo.hpp"
#include "halp/partition.hpp"
#include "halp/sched_sim.hpp"

namespace halp {

using Json = nlohmann::json;

// Looks up a zoo model by name: "vgg16" / "VGG-16", "mobilenet" (uses alpha
// and rho) or a full name such as "MobileNet_v1_0.25_160".
ModelSpec resolve_model(std::string_view name, double alpha = 1.0,
                        int rho = 224, int base_width = kVggBaseWidth,
                        int num_classes = kDefaultClasses);

Json to_json(const LayerSpec& spec);
Json to_json(const ModelSpec& model);
// Rebuilds the model from its family parameters; a "layers" list, when
// present, must match the rebuilt layers.
ModelSpec model_from_json(const Json& j);

Json to_json(const PartitionPlan& plan);
PartitionPlan plan_from_json(const Json& j);

Json to_json(const TimingModel& t);
TimingModel timing_from_json(const Json& j);
Json to_json(const ChannelModel& c);
ChannelModel channel_from_json(const Json& j);

Json to_json(const Timeline& t);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace halp

#endif  // HALP_SERIALIZATION_HPP_
