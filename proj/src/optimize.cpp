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

#include <limits>

#include "halp/errors.hpp"
#include "halp/partition.hpp"
#include "halp/sched_sim.hpp"

namespace halp {

PartitionPlan optimize_plan(const ModelSpec& model, const TimingModel& timing,
                            double throughput_mbps) {
  if (model.family != ModelFamily::kVgg16) return build_default_plan(model);
  const std::vector<int> candidates = feasible_vgg_z1(model);
  if (candidates.empty()) throw PlanError("no feasible partition for " + model.name);
  PartitionPlan best;
  double best_makespan = std::numeric_limits<double>::infinity();
  for (int z1 : candidates) {
    PartitionPlan p = build_plan_vgg(model, z1);
    const double m = simulate(p, model, timing, throughput_mbps).makespan;
    if (m < best_makespan) {
      best_makespan = m;
      best = std::move(p);
    }
  }
  return best;
}

}  // namespace halp
