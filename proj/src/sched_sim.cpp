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

#include "halp/sched_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "halp/errors.hpp"
#include "halp/kernels.hpp"

namespace halp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Task {
  int layer = 0;
  RowRange rows;
  bool first_of_layer = false;
};

// Golden-section search for the minimum of a unimodal function on [lo, hi],
// seeded by a coarse grid so mildly non-convex objectives still land near
// the global minimum.
template <typename F>
double minimize_1d(F&& f, double lo, double hi, int grid = 64) {
  double best_x = lo;
  double best = kInf;
  for (int i = 0; i <= grid; ++i) {
    const double x = lo + (hi - lo) * i / grid;
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - (hi - lo) / grid);
  double b = std::min(hi, best_x + (hi - lo) / grid);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = (a + b) / 2;
  return f(x) <= best ? x : best_x;
}

}  // namespace

ChannelModel ChannelModel::uniform(double lo, double hi) {
  if (!(lo > 0) || !(hi >= lo)) {
    throw std::invalid_argument("channel throughput needs 0 < lo <= hi");
  }
  return {lo, hi};
}

double ChannelModel::sample(std::mt19937_64& rng) const {
  if (is_fixed()) return lo_mbps;
  std::uniform_real_distribution<double> dist(lo_mbps, hi_mbps);
  return dist(rng);
}

std::string_view to_string(IntervalKind k) {
  switch (k) {
    case IntervalKind::kCompute:
      return "compute";
    case IntervalKind::kSend:
      return "send";
    case IntervalKind::kRecv:
      return "recv";
    case IntervalKind::kIdle:
      return "idle";
  }
  return "?";
}

std::vector<Interval> Timeline::of(Device node, IntervalKind kind) const {
  std::vector<Interval> out;
  for (const Interval& i : intervals) {
    if (i.node == node && i.kind == kind) out.push_back(i);
  }
  return out;
}

double Timeline::busy(Device node) const {
  double s = 0.0;
  for (const Interval& i : of(node, IntervalKind::kCompute)) s += i.end - i.start;
  return s;
}

double compute_time(const LayerSpec& layer, const FeatureShape& in, int rows,
                    const TimingModel& timing, bool include_fixed) {
  if (rows < 0) throw std::invalid_argument("rows must be >= 0");
  if (!(timing.mac_rate > 0)) throw std::invalid_argument("mac_rate must be > 0");
  int full_rows = 1;
  if (layer.is_spatial()) {
    full_rows = layer.output_extent(in.height);
  } else if (rows > 0) {
    rows = 1;
  }
  const double fixed = timing.layer_overhead_s * timing.fixed_fraction;
  const double spread = timing.layer_overhead_s * (1.0 - timing.fixed_fraction);
  const double macs =
      static_cast<double>(macs_per_output_row(layer, in)) * rows;
  return macs / timing.mac_rate + spread * rows / full_rows +
         (include_fixed ? fixed : 0.0);
}

double transmit_time(int rows, int width, int channels, double mbps) {
  if (!(mbps > 0)) throw std::invalid_argument("throughput must be > 0");
  if (rows <= 0) return 0.0;
  const double bits = 32.0 * rows * width * channels;
  return std::isinf(mbps) ? 0.0 : bits / (mbps * 1e6);
}

double standalone_time(const ModelSpec& model, const TimingModel& timing) {
  if (model.layers.empty()) return 0.0;
  const auto shapes = model.shapes();
  double t = 0.0;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& l = model.layers[i];
    const int rows = l.is_spatial() ? shapes[i + 1].height : 1;
    t += compute_time(l, shapes[i], rows, timing);
  }
  return t;
}

Timeline simulate(const PartitionPlan& plan, const ModelSpec& model,
                  const TimingModel& timing, double mbps) {
  if (!(mbps > 0)) throw std::invalid_argument("throughput must be > 0");
  const auto shapes = model.shapes();
  const int trunk = model.trunk_size();
  if (plan.trunk_size() != trunk) {
    throw PlanError("plan does not match model " + model.name);
  }
  Timeline tl;
  tl.standalone = standalone_time(model, timing);

  // avail[d][l][row]: time row `row` of layer l's input is usable on d.
  std::array<std::vector<std::vector<double>>, kNumDevices> avail;
  for (auto& per_dev : avail) {
    per_dev.resize(trunk + 1);
    for (int l = 0; l <= trunk; ++l) per_dev[l].assign(shapes[l].height, kInf);
  }
  std::fill(avail[0][0].begin(), avail[0][0].end(), 0.0);

  std::array<std::vector<Task>, kNumDevices> tasks;
  for (Device d : kAllDevices) {
    for (int l = 0; l < trunk; ++l) {
      bool first = true;
      for (RowRange r : compute_order(plan, d, l)) {
        tasks[index_of(d)].push_back({l, r, first});
        first = false;
      }
    }
  }
  for (int l = trunk; l < static_cast<int>(model.layers.size()); ++l) {
    tasks[0].push_back({l, {0, 1}, true});
  }

  std::array<std::array<double, kNumDevices>, kNumDevices> link_free{};
  std::vector<char> sent(plan.exchanges.size(), 0);
  std::array<double, kNumDevices> dev_free{};
  std::array<std::size_t, kNumDevices> next{};

  auto ship = [&](std::size_t idx, double ready) {
    const ExchangeStep& s = plan.exchanges[idx];
    sent[idx] = 1;
    const int width = shapes[s.before_layer].width;
    double& free = link_free[index_of(s.sender)][index_of(s.receiver)];
    const double start = std::max(ready, free);
    const double end = start + transmit_time(s.rows.size(), width, s.channels, mbps);
    free = end;
    tl.intervals.push_back(
        {s.sender, IntervalKind::kSend, s.before_layer, s.rows, s.receiver, start, end});
    tl.intervals.push_back(
        {s.receiver, IntervalKind::kRecv, s.before_layer, s.rows, s.sender, start, end});
    auto& dst = avail[index_of(s.receiver)][s.before_layer];
    for (int r = s.rows.begin; r < s.rows.end; ++r) dst[r] = end;
  };
  // Ships every unsent step from `sender` into `before_layer` whose rows are
  // all available, in plan order.
  auto ship_ready = [&](Device sender, int before_layer) {
    for (std::size_t i = 0; i < plan.exchanges.size(); ++i) {
      const ExchangeStep& s = plan.exchanges[i];
      if (sent[i] || s.sender != sender || s.before_layer != before_layer) continue;
      const auto& src = avail[index_of(sender)][before_layer];
      double ready = 0.0;
      for (int r = s.rows.begin; r < s.rows.end; ++r) ready = std::max(ready, src[r]);
      if (ready < kInf) ship(i, ready);
    }
  };
  ship_ready(Device::kHost, 0);

  std::size_t remaining = tasks[0].size() + tasks[1].size() + tasks[2].size();
  while (remaining > 0) {
    bool progress = false;
    for (Device d : kAllDevices) {
      const int di = index_of(d);
      while (next[di] < tasks[di].size()) {
        const Task& t = tasks[di][next[di]];
        double ready = 0.0;
        if (t.layer < trunk) {
          const RowRange rf =
              input_rows_for(model.layers[t.layer], t.rows, shapes[t.layer].height);
          for (int r = rf.begin; r < rf.end; ++r) {
            ready = std::max(ready, avail[di][t.layer][r]);
          }
        } else if (t.layer == trunk) {
          for (double v : avail[di][trunk]) ready = std::max(ready, v);
        }
        if (ready == kInf) break;
        const double start = std::max(ready, dev_free[di]);
        const int rows = t.layer < trunk ? t.rows.size() : 1;
        const double end = start + compute_time(model.layers[t.layer],
                                                shapes[t.layer], rows, timing,
                                                t.first_of_layer);
        dev_free[di] = end;
        tl.intervals.push_back({d, IntervalKind::kCompute, t.layer, t.rows, d, start, end});
        if (t.layer < trunk) {
          auto& out = avail[di][t.layer + 1];
          for (int r = t.rows.begin; r < t.rows.end; ++r) out[r] = end;
          ship_ready(d, t.layer + 1);
        }
        ++next[di];
        --remaining;
        progress = true;
      }
    }
    if (!progress) {
      throw PlanError("schedule has a dependency cycle or a missing input");
    }
  }

  // Idle gaps on each compute lane.
  for (Device d : kAllDevices) {
    double cursor = 0.0;
    for (const Interval& c : tl.of(d, IntervalKind::kCompute)) {
      if (c.start > cursor) {
        tl.intervals.push_back({d, IntervalKind::kIdle, c.layer, {}, d, cursor, c.start});
      }
      cursor = c.end;
    }
  }
  for (const Interval& i : tl.intervals) tl.makespan = std::max(tl.makespan, i.end);
  return tl;
}

std::string timeline_csv(const Timeline& t) {
  std::string out = "node,kind,layer,start_ms,end_ms\n";
  char line[128];
  for (const Interval& i : t.intervals) {
    std::snprintf(line, sizeof line, "%s,%s,%d,%.3f,%.3f\n",
                  std::string(to_string(i.node)).c_str(),
                  std::string(to_string(i.kind)).c_str(), i.layer,
                  i.start * 1e3, i.end * 1e3);
    out += line;
  }
  return out;
}

double Calibration::max_relative_residual() const {
  double m = 0.0;
  for (const auto& p : points) {
    m = std::max(m, std::abs(p.model_ms - p.measured_ms) / p.measured_ms);
  }
  return m;
}

const std::vector<MobileNetReference>& mobilenet_reference_times() {
  static const std::vector<MobileNetReference> kTimes = {
      {1.0, 224, 1739, 1078}, {1.0, 192, 1603, 924},  {1.0, 160, 1317, 804},
      {0.75, 224, 1442, 907}, {0.75, 192, 1126, 718}, {0.75, 160, 1049, 668},
      {0.5, 224, 1126, 700},  {0.5, 192, 959, 593},   {0.5, 160, 749, 462},
      {0.25, 224, 689, 432},  {0.25, 192, 617, 388},  {0.25, 160, 555, 350},
  };
  return kTimes;
}

Calibration calibrate_vgg16(const ModelSpec& vgg, double mbps) {
  const PartitionPlan def = build_plan_vgg(vgg, 4);
  const PartitionPlan opt = build_plan_vgg(vgg, 68);
  const double total_macs = static_cast<double>(count_macs(vgg).total);
  const double layers = static_cast<double>(vgg.layers.size());
  const double standalone = kVggStandaloneMs / 1e3;

  auto timing_for = [&](double overhead) {
    TimingModel t;
    t.layer_overhead_s = overhead;
    t.fixed_fraction = 1.0;
    t.mac_rate = total_macs / (standalone - layers * overhead);
    return t;
  };
  auto loss = [&](double overhead) {
    const TimingModel t = timing_for(overhead);
    const double a = simulate(def, vgg, t, mbps).makespan * 1e3 / kVggDefaultMs - 1;
    const double b = simulate(opt, vgg, t, mbps).makespan * 1e3 / kVggOptimizedMs - 1;
    return a * a + b * b;
  };
  const double best = minimize_1d(loss, 0.0, 0.9 * standalone / layers);
  Calibration c;
  c.timing = timing_for(best);
  c.points.push_back({"standalone", kVggStandaloneMs,
                      standalone_time(vgg, c.timing) * 1e3});
  c.points.push_back({"112-4-112", kVggDefaultMs,
                      simulate(def, vgg, c.timing, mbps).makespan * 1e3});
  c.points.push_back({"80-68-80", kVggOptimizedMs,
                      simulate(opt, vgg, c.timing, mbps).makespan * 1e3});
  return c;
}

Calibration calibrate_mobilenet(double mbps) {
  struct Case {
    ModelSpec model;
    PartitionPlan plan;
    MobileNetReference ref;
    double macs;
    double layers;
  };
  std::vector<Case> cases;
  for (const auto& ref : mobilenet_reference_times()) {
    ModelSpec m = build_mobilenet_v1(ref.alpha, ref.rho);
    PartitionPlan p = build_plan_mobilenet(m);
    const double macs = static_cast<double>(count_macs(m).total);
    const double layers = static_cast<double>(m.layers.size());
    cases.push_back({std::move(m), std::move(p), ref, macs, layers});
  }
  // Least squares for T = macs * s + layers * o (seconds per MAC, overhead).
  double sxx = 0, sxy = 0, syy = 0, sxt = 0, syt = 0;
  for (const Case& c : cases) {
    const double t = c.ref.standalone_ms / 1e3;
    sxx += c.macs * c.macs;
    sxy += c.macs * c.layers;
    syy += c.layers * c.layers;
    sxt += c.macs * t;
    syt += c.layers * t;
  }
  const double det = sxx * syy - sxy * sxy;
  const double sec_per_mac = (sxt * syy - syt * sxy) / det;
  const double overhead = (sxx * syt - sxy * sxt) / det;

  TimingModel base;
  base.mac_rate = 1.0 / sec_per_mac;
  base.layer_overhead_s = std::max(0.0, overhead);
  auto loss = [&](double fixed_fraction) {
    TimingModel t = base;
    t.fixed_fraction = fixed_fraction;
    double s = 0.0;
    for (const Case& c : cases) {
      const double r =
          simulate(c.plan, c.model, t, mbps).makespan * 1e3 / c.ref.halp_ms - 1;
      s += r * r;
    }
    return s;
  };
  Calibration cal;
  cal.timing = base;
  cal.timing.fixed_fraction = minimize_1d(loss, 0.0, 1.0, 40);
  for (const Case& c : cases) {
    cal.points.push_back({c.model.name + " standalone", c.ref.standalone_ms,
                          standalone_time(c.model, cal.timing) * 1e3});
    cal.points.push_back(
        {c.model.name + " HALP", c.ref.halp_ms,
         simulate(c.plan, c.model, cal.timing, mbps).makespan * 1e3});
  }
  return cal;
}

TimingModel calibrated_timing(const ModelSpec& model) {
  static std::mutex mu;
  static std::map<std::string, TimingModel> cache;
  const std::string key = model.family == ModelFamily::kVgg16
                              ? "vgg16/" + std::to_string(model.base_width)
                              : "mobilenet";
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const TimingModel t = model.family == ModelFamily::kVgg16
                            ? calibrate_vgg16(build_vgg16(model.base_width))
                                  .timing
                            : calibrate_mobilenet().timing;
  cache.emplace(key, t);
  return t;
}

}  // namespace halp
