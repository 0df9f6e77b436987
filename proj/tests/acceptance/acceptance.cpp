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

// Acceptance checks. One line per criterion; exit status is nonzero when any
// criterion fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "halp/errors.hpp"
#include "halp/frame.hpp"
#include "halp/kernels.hpp"
#include "halp/model_zoo.hpp"
#include "halp/partition.hpp"
#include "halp/runtime.hpp"
#include "halp/sched_sim.hpp"
#include "halp/selector.hpp"

#ifndef HALP_DATA_DIR
#define HALP_DATA_DIR "data"
#endif
#ifndef HALP_CLI_PATH
#define HALP_CLI_PATH "halp"
#endif

namespace {

using namespace halp;

struct Result {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

// 1 --------------------------------------------------------------------------

void equivalence(const ModelSpec& m, const PartitionPlan& p, Result& r, double& worst) {
  const ModelWeights w = make_weights(m, 11);
  const Tensor x = make_input(m, 12);
  const auto ref = monolithic_infer(m, w, x);
  const auto got = run_distributed_inprocess(m, w, p, x).output;
  const double err = max_relative_error(got, ref);
  worst = std::max(worst, err);
  r.require(err <= 1e-5, m.name + " z1=" + std::to_string(p.z1) + " err " + fmt(err));
}

Result criterion_equivalence() {
  Result r;
  double worst = 0;
  int runs = 0;
  const ModelSpec full = build_vgg16();
  equivalence(full, build_plan_vgg(full, 4), r, worst);
  ++runs;
  const ModelSpec small = build_vgg16(8);
  for (int z1 : {4, 68}) {
    equivalence(small, build_plan_vgg(small, z1), r, worst);
    ++runs;
  }
  for (const ModelSpec& m : mobilenet_variants()) {
    equivalence(m, build_plan_mobilenet(m), r, worst);
    ++runs;
  }
  r.detail << " " << runs << " runs, max rel err " << fmt(worst);
  return r;
}

// 2 --------------------------------------------------------------------------

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(HALP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result criterion_tables() {
  Result r;
  const std::string dir = std::string(HALP_DATA_DIR) + "/golden/";
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"plan vgg16", "vgg16_plan_default.txt"},
      {"plan vgg16 --optimize", "vgg16_plan_optimized.txt"},
      {"plan mobilenet --alpha 1.0 --rho 224", "mobilenet_1.0_224_plan.txt"},
  };
  for (const auto& [args, file] : cases) {
    const std::string want = read_file(dir + file);
    r.require(!want.empty() && run_cli(args) == want, "halp " + args + " vs " + file);
  }
  r.detail << " " << cases.size() << " tables compared byte for byte";
  return r;
}

// 3 --------------------------------------------------------------------------

Result criterion_recurrence() {
  Result r;
  r.require(overlap_recurrence(4) == 4, "fixed point 4");
  r.require(vgg_block_host_rows(4) == std::vector<int>{4, 4, 4, 4, 4}, "chain from 4");
  const auto chain = vgg_block_host_rows(68);
  r.require(chain == std::vector<int>{68, 36, 20, 12, 8}, "chain from 68");
  r.detail << " 68";
  for (std::size_t i = 1; i < chain.size(); ++i) r.detail << "->" << chain[i];
  return r;
}

// 4 --------------------------------------------------------------------------

Result criterion_optimizer() {
  Result r;
  const ModelSpec m = build_vgg16();
  const PartitionPlan p = optimize_plan(m, calibrated_timing(m), kReferenceThroughputMbps);
  r.require(p.z1 == 68, "z1 " + std::to_string(p.z1));
  r.detail << " z1 = " << p.z1 << " at 42 Mbps";
  return r;
}

// 5 --------------------------------------------------------------------------

Result criterion_gains() {
  Result r;
  const ModelSpec vgg = build_vgg16();
  const TimingModel t = calibrated_timing(vgg);
  const Timeline d = simulate(build_plan_vgg(vgg, 4), vgg, t, kReferenceThroughputMbps);
  const Timeline o = simulate(build_plan_vgg(vgg, 68), vgg, t, kReferenceThroughputMbps);
  auto within = [](double got, double want) { return std::abs(got - want) <= 0.1 * want; };
  r.require(within(d.standalone * 1e3, kVggStandaloneMs), "standalone " + fmt(d.standalone * 1e3));
  r.require(within(d.makespan * 1e3, kVggDefaultMs), "default " + fmt(d.makespan * 1e3));
  r.require(within(o.makespan * 1e3, kVggOptimizedMs), "optimized " + fmt(o.makespan * 1e3));
  r.require(within(d.gain(), 1.50), "default gain " + fmt(d.gain()));
  r.require(within(o.gain(), 1.71), "optimized gain " + fmt(o.gain()));
  double lo = 1e9, hi = 0;
  for (const ModelSpec& m : mobilenet_variants()) {
    const Timeline tl = simulate(build_plan_mobilenet(m), m, calibrated_timing(m),
                                 kReferenceThroughputMbps);
    lo = std::min(lo, tl.gain());
    hi = std::max(hi, tl.gain());
    r.require(tl.gain() >= 1.4 && tl.gain() <= 1.9, m.name + " gain " + fmt(tl.gain()));
  }
  r.detail << " VGG " << fmt(d.makespan * 1e3, 5) << "/" << fmt(o.makespan * 1e3, 5)
           << " ms, gains " << fmt(d.gain(), 3) << "/" << fmt(o.gain(), 3)
           << "; MobileNet gains " << fmt(lo, 3) << ".." << fmt(hi, 3);
  return r;
}

// 6 --------------------------------------------------------------------------

Result criterion_offload() {
  Result r;
  constexpr std::int64_t kbit = 8192;
  const std::int64_t threshold = 294 * kbit;
  r.require(offload_choice(threshold - 1, 112, 224, 3) == OffloadChoice::kRawImage, "just below");
  r.require(offload_choice(threshold, 112, 224, 3) == OffloadChoice::kHalfTensor, "at threshold");
  r.require(offload_choice(293 * kbit, 112, 224, 3) == OffloadChoice::kRawImage, "293 Kbits");
  r.require(offload_choice(295 * kbit, 112, 224, 3) == OffloadChoice::kHalfTensor, "295 Kbits");
  r.detail << " switch at " << threshold << " bits";
  return r;
}

// 7 --------------------------------------------------------------------------

Result criterion_selector(const Catalog& cat) {
  Result r;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<CatalogEntry> c(1 + rng() % 12);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double sa = 100 + 4900 * u(rng);
      c[i] = {"m" + std::to_string(i), 1.0, 224, sa, sa * (0.3 + 0.7 * u(rng)),
              std::round(u(rng) * 40) / 40};
    }
    const TaskInstance task{kBytesPerKB * (1 + 600 * u(rng)), 50 + 5000 * u(rng), 25 + 75 * u(rng)};
    for (Mode mode : {Mode::kStandalone, Mode::kHalp}) {
      double best = -1;
      for (const auto& e : c) {
        if (predict_latency(e, task, mode) <= task.deadline_ms) best = std::max(best, e.top1);
      }
      const auto pick = select_model(c, task, mode);
      const bool ok = best < 0 ? !pick
                               : pick && c[*pick].top1 == best &&
                                     predict_latency(c[*pick], task, mode) <= task.deadline_ms;
      if (!ok) ++mismatches;
    }
  }
  r.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  int none_violations = 0;
  for (double d = 0; d < 555; d += 0.5) {
    TaskInstance t;
    t.deadline_ms = d;
    if (select_model(cat.entries, t, Mode::kStandalone)) ++none_violations;
  }
  TaskInstance t;
  t.deadline_ms = std::nextafter(555.0, 0.0);
  if (select_model(cat.entries, t, Mode::kStandalone)) ++none_violations;
  r.require(none_violations == 0, "standalone pick below 555 ms");
  r.detail << " 10000 random catalogs x 2 modes, " << mismatches << " mismatches";
  return r;
}

// 8 --------------------------------------------------------------------------

std::vector<ReliabilityPoint> curve(const Catalog& cat, Mode mode, ChannelState ch,
                                    const std::vector<double>& deadlines) {
  ReliabilityConfig cfg;
  cfg.deadlines_ms = deadlines;
  cfg.mode = mode;
  cfg.channel = ch;
  cfg.tasks = 10000;
  cfg.seed = 1;
  return run_reliability(cat.entries, cfg);
}

Result criterion_reliability(const Catalog& cat) {
  Result r;
  constexpr double tol = 0.02;
  std::vector<double> grid;
  for (double d = 375; d <= 1800; d += 25) grid.push_back(d);
  std::vector<double> sa_grid = grid;
  sa_grid.push_back(std::nextafter(555.0, 0.0));
  sa_grid.push_back(555.0);
  std::sort(sa_grid.begin(), sa_grid.end());

  bool a_ok = true;
  for (ChannelState ch : {ChannelState::kPoor, ChannelState::kMedium, ChannelState::kGood}) {
    for (const auto& p : curve(cat, Mode::kStandalone, ch, sa_grid)) {
      const double want = p.deadline_ms < 555 ? 1.0 : 0.0;
      a_ok = a_ok && std::abs(p.failure_prob - want) <= tol;
    }
  }
  r.require(a_ok, "(a) standalone step at 555 ms");

  const std::array<ChannelState, 3> states = {ChannelState::kPoor, ChannelState::kMedium,
                                              ChannelState::kGood};
  const std::array<std::pair<double, double>, 3> c_bounds = {
      std::pair{0.9, 1.0}, std::pair{0.4, 0.6}, std::pair{0.0, 0.05}};
  std::ostringstream b_vals, c_vals;
  bool d_ok = true;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto name = std::string(to_string(states[i]));
    const auto h = curve(cat, Mode::kHalp, states[i], grid);
    const auto s = curve(cat, Mode::kStandalone, states[i], grid);
    const auto at = [&](double d) {
      return std::find_if(h.begin(), h.end(), [&](const auto& p) { return p.deadline_ms == d; })
          ->failure_prob;
    };
    const double f425 = at(425), f375 = at(375);
    b_vals << " " << name << "=" << fmt(f425, 3);
    c_vals << " " << name << "=" << fmt(f375, 3);
    r.require(f425 <= tol, "(b) " + name + " at 425 ms: " + fmt(f425, 3));
    const auto [lo, hi] = c_bounds[i];
    r.require(f375 >= lo - tol && f375 <= hi + tol,
              "(c) " + name + " at 375 ms: " + fmt(f375, 3));
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (h[k].service_reliability < s[k].service_reliability) d_ok = false;
    }
  }
  r.require(d_ok, "(d) HALP reliability below standalone");
  r.detail << " 425 ms:" << b_vals.str() << "; 375 ms:" << c_vals.str();
  return r;
}

// 9 --------------------------------------------------------------------------

float pad_at(const Tensor& t, int y, int x, int c) {
  if (y < 0 || y >= t.height() || x < 0 || x >= t.width()) return 0.0f;
  return t.at(y, x, c);
}

std::vector<double> oracle(const Tensor& in, const LayerSpec& s, const LayerWeights& w) {
  const int oh = s.output_extent(in.height());
  const int ow = (in.width() + 2 * s.padding - s.kernel_w) / s.stride + 1;
  std::vector<double> out;
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int co = 0; co < s.out_channels; ++co) {
        double acc;
        if (s.kind == LayerKind::kMaxPool) {
          acc = -INFINITY;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) acc = std::max<double>(acc, in.at(2 * y + dy, 2 * x + dx, co));
          out.push_back(acc);
          continue;
        }
        acc = w.bias[co];
        for (int ky = 0; ky < s.kernel_h; ++ky)
          for (int kx = 0; kx < s.kernel_w; ++kx) {
            const int iy = y * s.stride - s.padding + ky, ix = x * s.stride - s.padding + kx;
            if (s.kind == LayerKind::kDepthwiseConv) {
              acc += double(w.kernel[(ky * s.kernel_w + kx) * s.in_channels + co]) * pad_at(in, iy, ix, co);
            } else {
              for (int ci = 0; ci < s.in_channels; ++ci)
                acc += double(w.kernel[((ky * s.kernel_w + kx) * s.in_channels + ci) * s.out_channels + co]) *
                       pad_at(in, iy, ix, ci);
            }
          }
        if (s.activation == Activation::kReLU) acc = std::max(acc, 0.0);
        out.push_back(acc);
      }
  return out;
}

double rel_err(std::span<const float> got, const std::vector<double>& want) {
  if (got.size() != want.size()) return INFINITY;
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    diff = std::max(diff, std::abs(got[i] - want[i]));
    scale = std::max(scale, std::abs(want[i]));
  }
  return scale > 0 ? diff / scale : diff;
}

Result criterion_properties() {
  Result r;
  std::mt19937_64 rng(99);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::array<LayerKind, 5> kinds = {LayerKind::kConv, LayerKind::kDepthwiseConv,
                                          LayerKind::kPointwiseConv, LayerKind::kMaxPool,
                                          LayerKind::kFullyConnected};
  int kernel_cases = 0;
  for (LayerKind kind : kinds) {
    for (int i = 0; i < 100; ++i, ++kernel_cases) {
      const int cin = pick(1, 6), cout = pick(1, 6);
      const Activation act = i % 2 ? Activation::kReLU : Activation::kNone;
      if (kind == LayerKind::kFullyConnected) {
        LayerSpec s = make_fully_connected(cin * 4, cout, act);
        const LayerWeights w = random_weights(s, i);
        const Tensor x = random_tensor(1, 1, cin * 4, 1000 + i);
        std::vector<double> want(cout);
        for (int o = 0; o < cout; ++o) {
          double acc = w.bias[o];
          for (int k = 0; k < cin * 4; ++k) acc += double(w.kernel[o * cin * 4 + k]) * x.data()[k];
          want[o] = act == Activation::kReLU ? std::max(acc, 0.0) : acc;
        }
        const auto got = fully_connected(x.data(), s, w);
        r.require(rel_err(got, want) <= 1e-5, "fc case " + std::to_string(i));
        continue;
      }
      LayerSpec s;
      int h = pick(2, 9) * 2, wd = pick(2, 9) * 2;
      switch (kind) {
        case LayerKind::kConv: s = make_conv(cin, cout, pick(1, 2)); break;
        case LayerKind::kDepthwiseConv: s = make_depthwise(cin, pick(1, 2)); break;
        case LayerKind::kPointwiseConv: s = make_pointwise(cin, cout); break;
        default: s = make_maxpool(cin); break;
      }
      if (s.has_weights()) s.activation = act;
      const LayerWeights w = s.has_weights() ? random_weights(s, 500 + i) : LayerWeights{};
      const Tensor x = random_tensor(h, wd, cin, 2000 + i);
      const Tensor got = compute_rows(s, w, x, h, {0, s.output_extent(h)});
      r.require(rel_err(got.data(), oracle(x, s, w)) <= 1e-5,
                std::string(to_string(kind)) + " case " + std::to_string(i));
    }
  }

  int plans = 0;
  const ModelSpec vgg = build_vgg16();
  std::vector<std::pair<ModelSpec, PartitionPlan>> all;
  for (int z1 : feasible_vgg_z1(vgg)) all.emplace_back(vgg, build_plan_vgg(vgg, z1));
  for (const ModelSpec& m : mobilenet_variants()) all.emplace_back(m, build_plan_mobilenet(m));
  for (const auto& [m, p] : all) {
    const auto v = validate_plan(p, m);
    r.require(v.empty(), m.name + " plan invalid: " + (v.empty() ? "" : v.front()));
    ++plans;
  }

  int frames_ok = 0, fuzz_rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    Frame f;
    f.header = {static_cast<std::uint16_t>(pick(0, 40)), static_cast<std::uint8_t>(pick(0, 2)),
                static_cast<std::uint16_t>(pick(0, 200)), static_cast<std::uint16_t>(pick(1, 4)),
                static_cast<std::uint16_t>(pick(1, 8)), static_cast<std::uint16_t>(pick(1, 8))};
    f.payload.resize(f.header.payload_floats());
    for (float& v : f.payload) v = std::uniform_real_distribution<float>(-1e6f, 1e6f)(rng);
    const auto bytes = serialize_frame(f);
    if (deserialize_frame(bytes) == f && bytes.size() == f.wire_size()) ++frames_ok;
    std::vector<std::uint8_t> bad = bytes;
    if (i % 2) {
      bad.resize(rng() % bad.size());
    } else {
      for (int k = 0; k < 4; ++k) bad[rng() % bad.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    }
    try {
      const Frame g = deserialize_frame(bad);
      r.require(g.wire_size() == bad.size(), "fuzzed frame length");
    } catch (const FrameError&) {
      ++fuzz_rejected;
    } catch (...) {
      r.require(false, "fuzzed frame raised a non-frame error");
    }
  }
  r.require(frames_ok == 1000, "frame round trip");

  const TimingModel t = calibrated_timing(vgg);
  const PartitionPlan p = build_plan_vgg(vgg, 4);
  double prev = INFINITY;
  bool monotone = true;
  for (int i = 0; i < 20; ++i) {
    const double mbps = 5 * std::pow(1.5, i);
    const double ms = simulate(p, vgg, t, mbps).makespan;
    monotone = monotone && ms <= prev + 1e-12;
    prev = ms;
  }
  r.require(monotone, "makespan not monotone in throughput");

  r.detail << " " << kernel_cases << " kernel cases, " << plans << " plans, 1000 frames ("
           << fuzz_rejected << " corrupted rejected), 20 rates";
  return r;
}

}  // namespace

int main() {
  const Catalog cat = load_catalog(std::string(HALP_DATA_DIR) + "/catalog.json");
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"equivalence", criterion_equivalence},
      {"partition tables", criterion_tables},
      {"recurrence", criterion_recurrence},
      {"optimizer", criterion_optimizer},
      {"simulated gains", criterion_gains},
      {"offload threshold", criterion_offload},
      {"selector properties", [&] { return criterion_selector(cat); }},
      {"reliability curves", [&] { return criterion_reliability(cat); }},
      {"property suites", criterion_properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << " exception: " << e.what();
    }
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ":"
              << r.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
