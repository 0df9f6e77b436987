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

#include "halp/selector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace halp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr int kChunk = 512;

struct Partial {
  std::vector<int> failures;
  std::vector<double> accuracy_sum;
};

}  // namespace

void CatalogEntry::validate() const {
  if (name.empty()) throw std::invalid_argument("catalog entry without a name");
  if (!(standalone_ms > 0) || !(halp_ms > 0)) {
    throw std::invalid_argument(name + ": latencies must be positive");
  }
  if (halp_ms > standalone_ms) {
    throw std::invalid_argument(name + ": HALP time exceeds standalone time");
  }
  if (!(top1 >= 0.0 && top1 <= 1.0)) {
    throw std::invalid_argument(name + ": accuracy must be in [0, 1]");
  }
}

Catalog catalog_from_json(const nlohmann::json& j) {
  Catalog c;
  c.note = j.value("note", "");
  for (const auto& e : j.at("entries")) {
    CatalogEntry x;
    x.name = e.at("name").get<std::string>();
    x.alpha = e.value("alpha", 1.0);
    x.rho = e.value("rho", 224);
    x.standalone_ms = e.at("standalone_ms").get<double>();
    x.halp_ms = e.at("halp_ms").get<double>();
    x.top1 = e.at("top1").get<double>();
    x.validate();
    c.entries.push_back(std::move(x));
  }
  if (c.entries.empty()) throw std::invalid_argument("catalog is empty");
  return c;
}

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return catalog_from_json(nlohmann::json::parse(in));
}

nlohmann::json to_json(const Catalog& c) {
  nlohmann::json entries = nlohmann::json::array();
  for (const CatalogEntry& e : c.entries) {
    entries.push_back({{"name", e.name},
                       {"alpha", e.alpha},
                       {"rho", e.rho},
                       {"standalone_ms", e.standalone_ms},
                       {"halp_ms", e.halp_ms},
                       {"top1", e.top1}});
  }
  return {{"note", c.note}, {"entries", std::move(entries)}};
}

std::string_view to_string(Mode m) {
  return m == Mode::kStandalone ? "standalone" : "halp";
}

Mode mode_from_string(std::string_view s) {
  if (s == "standalone") return Mode::kStandalone;
  if (s == "halp") return Mode::kHalp;
  throw std::invalid_argument("mode must be standalone or halp");
}

std::string_view to_string(ChannelState s) {
  switch (s) {
    case ChannelState::kPoor:
      return "poor";
    case ChannelState::kMedium:
      return "medium";
    case ChannelState::kGood:
      return "good";
  }
  return "?";
}

ChannelState channel_state_from_string(std::string_view s) {
  if (s == "poor") return ChannelState::kPoor;
  if (s == "medium") return ChannelState::kMedium;
  if (s == "good") return ChannelState::kGood;
  throw std::invalid_argument("channel must be poor, medium or good");
}

ChannelModel channel_for(ChannelState s) {
  switch (s) {
    case ChannelState::kPoor:
      return ChannelModel::uniform(25, 50);
    case ChannelState::kMedium:
      return ChannelModel::uniform(50, 75);
    case ChannelState::kGood:
      return ChannelModel::uniform(75, 100);
  }
  throw std::invalid_argument("bad channel state");
}

double ImageSizeModel::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> dist(mean_bytes, stddev_bytes);
  return std::max(min_bytes, dist(rng));
}

double predict_latency(const CatalogEntry& entry, const TaskInstance& task,
                       Mode mode) {
  if (mode == Mode::kStandalone) return entry.standalone_ms;
  if (!(task.mbps > 0)) throw std::invalid_argument("throughput must be > 0");
  const double offload_ms = task.image_bytes * 8.0 / (task.mbps * 1e3);
  return offload_ms + entry.halp_ms;
}

std::optional<std::size_t> select_model(std::span<const CatalogEntry> catalog,
                                        const TaskInstance& task, Mode mode) {
  std::optional<std::size_t> best;
  double best_latency = 0.0;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const double lat = predict_latency(catalog[i], task, mode);
    if (lat > task.deadline_ms) continue;
    if (best) {
      const CatalogEntry& b = catalog[*best];
      const CatalogEntry& c = catalog[i];
      if (c.top1 < b.top1) continue;
      if (c.top1 == b.top1) {
        if (lat > best_latency) continue;
        if (lat == best_latency && c.name >= b.name) continue;
      }
    }
    best = i;
    best_latency = lat;
  }
  return best;
}

std::vector<ReliabilityPoint> run_reliability(std::span<const CatalogEntry> catalog,
                                              const ReliabilityConfig& config) {
  if (config.tasks < 1) throw std::invalid_argument("need at least one task");
  if (catalog.empty()) throw std::invalid_argument("catalog is empty");
  const ChannelModel channel = channel_for(config.channel);
  const std::size_t nd = config.deadlines_ms.size();
  const int chunks = (config.tasks + kChunk - 1) / kChunk;
  std::vector<Partial> partial(chunks, {std::vector<int>(nd, 0), std::vector<double>(nd, 0.0)});

  auto run_chunk = [&](int c) {
    Partial& p = partial[c];
    const int end = std::min(config.tasks, (c + 1) * kChunk);
    for (int i = c * kChunk; i < end; ++i) {
      std::mt19937_64 rng(splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(i))));
      TaskInstance task;
      task.image_bytes = config.image.sample(rng);
      task.mbps = channel.sample(rng);
      for (std::size_t d = 0; d < nd; ++d) {
        task.deadline_ms = config.deadlines_ms[d];
        const auto pick = select_model(catalog, task, config.mode);
        if (pick) {
          p.accuracy_sum[d] += catalog[*pick].top1;
        } else {
          ++p.failures[d];
        }
      }
    }
  };

  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, chunks);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int c = t; c < chunks; c += threads) run_chunk(c);
    });
  }
  for (auto& th : pool) th.join();

  std::vector<ReliabilityPoint> out;
  for (std::size_t d = 0; d < nd; ++d) {
    int failures = 0;
    double acc = 0.0;
    for (const Partial& p : partial) {
      failures += p.failures[d];
      acc += p.accuracy_sum[d];
    }
    ReliabilityPoint r;
    r.deadline_ms = config.deadlines_ms[d];
    r.mode = config.mode;
    r.channel = config.channel;
    r.tasks = config.tasks;
    r.failure_prob = static_cast<double>(failures) / config.tasks;
    const int ok = config.tasks - failures;
    r.expected_accuracy = ok > 0 ? acc / ok : 0.0;
    r.service_reliability = acc / config.tasks;
    out.push_back(r);
  }
  return out;
}

std::string reliability_csv(std::span<const ReliabilityPoint> points) {
  std::string out = "deadline_ms,mode,channel,failure_prob,reliability\n";
  char line[160];
  for (const ReliabilityPoint& p : points) {
    std::snprintf(line, sizeof line, "%g,%s,%s,%.4f,%.4f\n", p.deadline_ms,
                  std::string(to_string(p.mode)).c_str(),
                  std::string(to_string(p.channel)).c_str(), p.failure_prob,
                  p.service_reliability);
    out += line;
  }
  return out;
}

}  // namespace halp
