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

#ifndef HALP_SELECTOR_HPP_
#define HALP_SELECTOR_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "halp/sched_sim.hpp"

namespace halp {

struct CatalogEntry {
  std::string name;
  double alpha = 1.0;
  int rho = 224;
  double standalone_ms = 0.0;
  double halp_ms = 0.0;
  double top1 = 0.0;  // fraction in [0, 1]

  void validate() const;
  bool operator==(const CatalogEntry&) const = default;
};

struct Catalog {
  std::vector<CatalogEntry> entries;
  std::string note;
};

// {"note": ..., "entries": [{name, alpha, rho, standalone_ms, halp_ms,
// top1}, ...]}; every entry is validated.
Catalog catalog_from_json(const nlohmann::json& j);
Catalog load_catalog(const std::string& path);
nlohmann::json to_json(const Catalog& c);

enum class Mode { kStandalone, kHalp };
std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

enum class ChannelState { kPoor, kMedium, kGood };
std::string_view to_string(ChannelState s);
ChannelState channel_state_from_string(std::string_view s);
// Poor U(25, 50), Medium U(50, 75), Good U(75, 100) Mbps.
ChannelModel channel_for(ChannelState s);

inline constexpr double kBytesPerKB = 1024.0;

struct TaskInstance {
  double image_bytes = 300 * kBytesPerKB;
  double deadline_ms = 0.0;
  double mbps = 42.0;
};

// Image size N(300 KB, 50 KB) clamped below at 1 KB.
struct ImageSizeModel {
  double mean_bytes = 300 * kBytesPerKB;
  double stddev_bytes = 50 * kBytesPerKB;
  double min_bytes = 1 * kBytesPerKB;
  double sample(std::mt19937_64& rng) const;
};

// Standalone: the entry's standalone time. HALP: image bits over the drawn
// rate plus the entry's HALP time.
double predict_latency(const CatalogEntry& entry, const TaskInstance& task,
                       Mode mode);

// Index of the most accurate entry meeting the deadline; ties go to the
// lower predicted latency, then the name. nullopt when none qualifies.
std::optional<std::size_t> select_model(std::span<const CatalogEntry> catalog,
                                        const TaskInstance& task, Mode mode);

struct ReliabilityPoint {
  double deadline_ms = 0.0;
  Mode mode = Mode::kHalp;
  ChannelState channel = ChannelState::kMedium;
  int tasks = 0;
  double failure_prob = 0.0;
  double expected_accuracy = 0.0;  // mean accuracy over successful tasks
  double service_reliability = 0.0;
};

struct ReliabilityConfig {
  std::vector<double> deadlines_ms;
  Mode mode = Mode::kHalp;
  ChannelState channel = ChannelState::kMedium;
  int tasks = 10000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  ImageSizeModel image;
};

// Monte Carlo over `tasks` random tasks; every deadline sees the same task
// draws. Results do not depend on the thread count.
std::vector<ReliabilityPoint> run_reliability(std::span<const CatalogEntry> catalog,
                                              const ReliabilityConfig& config);

// deadline_ms,mode,channel,failure_prob,reliability
std::string reliability_csv(std::span<const ReliabilityPoint> points);

}  // namespace halp

#endif  // HALP_SELECTOR_HPP_
