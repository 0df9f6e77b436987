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

#include "halp/partition.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "halp/errors.hpp"
#include "halp/kernels.hpp"

namespace halp {
namespace {

std::string fmt_range(RowRange r) {
  return "[" + std::to_string(r.begin) + ", " + std::to_string(r.end) + ")";
}

// Rows of `need` not inside `have`, as at most two ranges.
std::vector<RowRange> subtract(RowRange need, RowRange have) {
  if (need.empty()) return {};
  if (have.empty()) return {need};
  std::vector<RowRange> out;
  RowRange below{need.begin, std::min(need.end, have.begin)};
  RowRange above{std::max(need.begin, have.end), need.end};
  if (!below.empty()) out.push_back(below);
  if (!above.empty()) out.push_back(above);
  return out;
}

bool step_less(const ExchangeStep& a, const ExchangeStep& b) {
  if (a.before_layer != b.before_layer) return a.before_layer < b.before_layer;
  if (a.sender != b.sender) return a.sender < b.sender;
  if (a.receiver != b.receiver) return a.receiver < b.receiver;
  return a.rows.begin < b.rows.begin;
}

// Trunk layer indices of the first conv of each VGG block.
std::vector<int> vgg_block_starts(const ModelSpec& model) {
  std::vector<int> starts{0};
  const int trunk = model.trunk_size();
  for (int i = 0; i + 1 < trunk; ++i) {
    if (model.layers[i].kind == LayerKind::kMaxPool) starts.push_back(i + 1);
  }
  return starts;
}

}  // namespace

std::string_view to_string(Device d) {
  switch (d) {
    case Device::kHost:
      return "host";
    case Device::kEd1:
      return "ed1";
    case Device::kEd2:
      return "ed2";
  }
  return "?";
}

Device device_from_string(std::string_view name) {
  for (Device d : kAllDevices) {
    if (to_string(d) == name) return d;
  }
  throw std::invalid_argument("unknown device '" + std::string(name) + "'");
}

std::vector<ExchangeStep> PartitionPlan::steps_into(int before_layer,
                                                    Device receiver) const {
  std::vector<ExchangeStep> out;
  for (const auto& s : exchanges) {
    if (s.before_layer == before_layer && s.receiver == receiver) {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<ExchangeStep> PartitionPlan::steps_from(int before_layer,
                                                    Device sender) const {
  std::vector<ExchangeStep> out;
  for (const auto& s : exchanges) {
    if (s.before_layer == before_layer && s.sender == sender) out.push_back(s);
  }
  return out;
}

RowRange receptive_field(const LayerSpec& spec, RowRange out,
                         int input_height) {
  const int out_h = spec.output_extent(input_height);
  if (out.empty() || out.begin < 0 || out.end > out_h) {
    throw PlanError("receptive field requested for rows " + fmt_range(out) +
                    " of a layer with " + std::to_string(out_h) +
                    " output rows");
  }
  return input_rows_for(spec, out, input_height);
}

int overlap_recurrence(int z_prev) {
  if (z_prev < 2 || z_prev % 2 != 0) {
    throw PlanError("overlap rows must be even and >= 2 to cross a pooling "
                    "layer, got " +
                    std::to_string(z_prev));
  }
  return z_prev / 2 + 2;
}

std::vector<int> vgg_block_host_rows(int z1, int blocks) {
  std::vector<int> z{z1};
  for (int i = 1; i < blocks; ++i) {
    if (z.back() % 2 != 0) {
      throw PlanError("host rows z_" + std::to_string(i) + " = " +
                      std::to_string(z.back()) +
                      " are odd: the rows left to the secondaries break the "
                      "2x2 pooling windows");
    }
    z.push_back(overlap_recurrence(z.back()));
  }
  if (z.back() % 2 != 0) {
    throw PlanError("host rows z_" + std::to_string(blocks) + " = " +
                    std::to_string(z.back()) +
                    " are odd: the rows left to the secondaries break the 2x2 "
                    "pooling windows");
  }
  return z;
}

PartitionPlan plan_from_host_rows(const ModelSpec& model,
                                  const std::vector<RowRange>& host_output,
                                  int z1) {
  const auto shapes = model.shapes();
  const int trunk = model.trunk_size();
  if (static_cast<int>(host_output.size()) != trunk) {
    throw PlanError("need one host range per trunk layer (" +
                    std::to_string(trunk) + "), got " +
                    std::to_string(host_output.size()));
  }
  PartitionPlan plan;
  plan.model_name = model.name;
  plan.z1 = z1;
  for (int l = 0; l < trunk; ++l) {
    const int in_h = shapes[l].height;
    const int out_h = shapes[l + 1].height;
    const RowRange h = host_output[l];
    if (h.empty() || h.begin < 0 || h.end > out_h) {
      throw PlanError("layer " + std::to_string(l) + ": host rows " +
                      fmt_range(h) + " invalid for " + std::to_string(out_h) +
                      " output rows");
    }
    PlanLayer pl;
    pl.layer_index = l;
    pl.output = {h, RowRange{0, h.begin}, RowRange{h.end, out_h}};
    for (int d = 0; d < kNumDevices; ++d) {
      if (!pl.output[d].empty()) {
        pl.input[d] = receptive_field(model.layers[l], pl.output[d], in_h);
      }
    }
    plan.layers.push_back(pl);
  }

  // Input distribution.
  for (Device d : kSecondaries) {
    const RowRange need = plan.layers[0].input_of(d);
    if (!need.empty()) {
      plan.exchanges.push_back(
          {0, Device::kHost, d, need, model.input.channels});
    }
  }
  // Boundary exchanges between consecutive trunk layers.
  for (int l = 1; l < trunk; ++l) {
    const PlanLayer& prev = plan.layers[l - 1];
    const PlanLayer& cur = plan.layers[l];
    for (Device d : kAllDevices) {
      for (RowRange missing : subtract(cur.input_of(d), prev.output_of(d))) {
        for (Device owner : kAllDevices) {
          if (owner == d) continue;
          const RowRange part = intersect(missing, prev.output_of(owner));
          if (!part.empty()) {
            plan.exchanges.push_back({l, owner, d, part, shapes[l].channels});
          }
        }
      }
    }
  }
  // Final merge at the host.
  for (Device d : kSecondaries) {
    const RowRange rows = plan.layers.back().output_of(d);
    if (!rows.empty()) {
      plan.exchanges.push_back(
          {trunk, d, Device::kHost, rows, shapes[trunk].channels});
    }
  }
  std::stable_sort(plan.exchanges.begin(), plan.exchanges.end(), step_less);
  return plan;
}

PartitionPlan build_plan_vgg(const ModelSpec& model, int z1) {
  if (model.family != ModelFamily::kVgg16) {
    throw PlanError("build_plan_vgg needs a VGG-16 model, got " + model.name);
  }
  const int max_z1 = model.input.height / 2;
  if (z1 % 2 != 0 || z1 < 4 || z1 > max_z1) {
    throw PlanError("z1 must be even and in [4, " + std::to_string(max_z1) +
                    "], got " + std::to_string(z1));
  }
  const auto starts = vgg_block_starts(model);
  const auto z = vgg_block_host_rows(z1, static_cast<int>(starts.size()));
  const auto shapes = model.shapes();
  const int trunk = model.trunk_size();

  std::vector<RowRange> host(trunk);
  for (std::size_t blk = 0; blk < starts.size(); ++blk) {
    const int first = starts[blk];
    const int height = shapes[first].height;
    const int mid = height / 2;
    const RowRange conv_rows{mid - z[blk] / 2 + 1, mid + z[blk] / 2 - 1};
    if (conv_rows.begin < 1 || conv_rows.end > height - 1) {
      throw PlanError("z" + std::to_string(blk + 1) + " = " +
                      std::to_string(z[blk]) +
                      " leaves no rows to a secondary in block " +
                      std::to_string(blk + 1));
    }
    int l = first;
    for (; l < trunk && model.layers[l].kind != LayerKind::kMaxPool; ++l) {
      host[l] = conv_rows;
    }
    if (l < trunk) {
      host[l] = {conv_rows.begin / 2, (conv_rows.end + 1) / 2};
    }
    // The last pooling layer feeds the merge directly, so it must split on
    // whole 2x2 windows without any extra exchange.
    if (blk + 1 == starts.size() && conv_rows.begin % 2 != 0) {
      throw PlanError("z" + std::to_string(blk + 1) + " = " +
                      std::to_string(z[blk]) + " leaves " +
                      std::to_string(conv_rows.begin) +
                      " rows (odd) to each secondary before the final "
                      "pooling layer");
    }
  }
  PartitionPlan plan = plan_from_host_rows(model, host, z1);
  for (std::size_t blk = 0; blk < starts.size(); ++blk) {
    if (plan.layers[starts[blk]].host_rows() != z[blk]) {
      throw PlanError("block " + std::to_string(blk + 1) + " host holds " +
                      std::to_string(plan.layers[starts[blk]].host_rows()) +
                      " rows, recurrence gives " + std::to_string(z[blk]));
    }
  }
  return plan;
}

PartitionPlan build_plan_mobilenet(const ModelSpec& model) {
  if (model.family != ModelFamily::kMobileNetV1) {
    throw PlanError("build_plan_mobilenet needs a MobileNet-V1 model, got " +
                    model.name);
  }
  const auto shapes = model.shapes();
  const int trunk = model.trunk_size();
  auto next_spatial_stride = [&](int l) {
    for (int k = l + 1; k < trunk; ++k) {
      if (model.layers[k].kind != LayerKind::kPointwiseConv) {
        return model.layers[k].stride;
      }
    }
    return 0;
  };

  std::vector<RowRange> host(trunk);
  for (int l = 0; l < trunk; ++l) {
    const LayerSpec& spec = model.layers[l];
    const int out_h = shapes[l + 1].height;
    int begin = 0;
    if (spec.kind == LayerKind::kPointwiseConv) {
      host[l] = host[l - 1];
      continue;
    }
    if (spec.stride == 1) {
      // Two rows straddling the middle; before a stride-2 layer the pair
      // must start on an even row so the host's 5-row window only needs one
      // extra row from ED1.
      begin = out_h / 2 - 1;
      if (next_spatial_stride(l) == 2 && begin % 2 != 0) --begin;
    } else if (l == 0) {
      begin = out_h / 2 - 1;
    } else {
      const int p = host[l - 1].begin;
      begin = (p % 2 == 0 ? p : p - 1) / 2;
    }
    begin = std::clamp(begin, 1, out_h - 3);
    host[l] = {begin, begin + 2};
  }
  return plan_from_host_rows(model, host);
}

PartitionPlan build_default_plan(const ModelSpec& model) {
  if (model.family == ModelFamily::kVgg16) return build_plan_vgg(model, 4);
  return build_plan_mobilenet(model);
}

std::vector<int> feasible_vgg_z1(const ModelSpec& model) {
  std::vector<int> out;
  for (int z1 = 4; z1 <= model.input.height / 2; z1 += 2) {
    try {
      (void)build_plan_vgg(model, z1);
      out.push_back(z1);
    } catch (const PlanError&) {
    }
  }
  return out;
}

std::vector<std::string> validate_plan(const PartitionPlan& plan,
                                       const ModelSpec& model) {
  std::vector<std::string> bad;
  const auto shapes = model.shapes();
  const int trunk = model.trunk_size();
  if (plan.trunk_size() != trunk) {
    bad.push_back("plan has " + std::to_string(plan.trunk_size()) +
                  " layers, model trunk has " + std::to_string(trunk));
    return bad;
  }
  for (int l = 0; l < trunk; ++l) {
    const PlanLayer& pl = plan.layers[l];
    const int out_h = shapes[l + 1].height;
    const int in_h = shapes[l].height;
    const std::string where = "layer " + std::to_string(l) + ": ";
    if (pl.layer_index != l) bad.push_back(where + "layer_index mismatch");
    std::vector<RowRange> parts;
    for (const RowRange& r : pl.output) {
      if (!r.empty()) parts.push_back(r);
    }
    std::sort(parts.begin(), parts.end(),
              [](RowRange a, RowRange b) { return a.begin < b.begin; });
    int cursor = 0;
    for (const RowRange& r : parts) {
      if (r.begin < cursor) {
        bad.push_back(where + "output rows overlap at " + fmt_range(r));
      } else if (r.begin > cursor) {
        bad.push_back(where + "output rows " +
                      fmt_range({cursor, r.begin}) + " unassigned");
      }
      cursor = std::max(cursor, r.end);
    }
    if (cursor != out_h) {
      bad.push_back(where + "output rows cover [0, " + std::to_string(cursor) +
                    ") of " + std::to_string(out_h));
    }
    for (Device d : kAllDevices) {
      const RowRange out = pl.output_of(d);
      if (out.empty() || out.end > out_h || out.begin < 0) continue;
      const RowRange rf = input_rows_for(model.layers[l], out, in_h);
      if (!pl.input_of(d).contains(rf)) {
        bad.push_back(where + std::string(to_string(d)) + " input range " +
                      fmt_range(pl.input_of(d)) +
                      " misses its receptive field " + fmt_range(rf));
      }
    }
  }
  if (!bad.empty()) return bad;

  for (const ExchangeStep& s : plan.exchanges) {
    const std::string what = "step before layer " +
                             std::to_string(s.before_layer) + " " +
                             std::string(to_string(s.sender)) + "->" +
                             std::string(to_string(s.receiver)) + " ";
    if (s.before_layer < 0 || s.before_layer > trunk) {
      bad.push_back(what + "targets no layer");
      continue;
    }
    if (s.rows.empty()) bad.push_back(what + "has no rows");
    if (s.sender == s.receiver) bad.push_back(what + "sends to itself");
    const RowRange owned =
        s.before_layer == 0
            ? (s.sender == Device::kHost ? RowRange{0, model.input.height}
                                         : RowRange{})
            : plan.layers[s.before_layer - 1].output_of(s.sender);
    if (!owned.contains(s.rows)) {
      bad.push_back(what + "sends rows " + fmt_range(s.rows) +
                    " outside the sender's rows " + fmt_range(owned));
    }
  }

  auto held_rows = [&](int l, Device d) {
    std::vector<char> held(shapes[l].height, 0);
    auto mark = [&](RowRange r) {
      for (int i = std::max(0, r.begin);
           i < std::min<int>(r.end, static_cast<int>(held.size())); ++i) {
        held[i] = 1;
      }
    };
    if (l == 0) {
      if (d == Device::kHost) mark({0, shapes[0].height});
    } else {
      mark(plan.layers[l - 1].output_of(d));
    }
    for (const ExchangeStep& s : plan.steps_into(l, d)) mark(s.rows);
    return held;
  };
  for (int l = 0; l < trunk; ++l) {
    for (Device d : kAllDevices) {
      const RowRange out = plan.layers[l].output_of(d);
      if (out.empty()) continue;
      const RowRange rf = input_rows_for(model.layers[l], out, shapes[l].height);
      const auto held = held_rows(l, d);
      for (int r = rf.begin; r < rf.end; ++r) {
        if (!held[r]) {
          bad.push_back("layer " + std::to_string(l) + ": " +
                        std::string(to_string(d)) + " lacks input row " +
                        std::to_string(r) + " of receptive field " +
                        fmt_range(rf));
          break;
        }
      }
    }
  }
  const auto merged = held_rows(trunk, Device::kHost);
  for (std::size_t r = 0; r < merged.size(); ++r) {
    if (!merged[r]) {
      bad.push_back("merge: host lacks final row " + std::to_string(r));
      break;
    }
  }
  return bad;
}

std::vector<RowRange> compute_order(const PartitionPlan& plan, Device device,
                                    int layer) {
  const RowRange owned = plan.layers.at(layer).output_of(device);
  std::vector<RowRange> chunks;
  if (owned.empty()) return chunks;
  std::vector<RowRange> left{owned};
  auto take = [&](RowRange want) {
    std::vector<RowRange> rest;
    for (RowRange piece : left) {
      const RowRange hit = intersect(piece, want);
      if (hit.empty()) {
        rest.push_back(piece);
        continue;
      }
      chunks.push_back(hit);
      for (RowRange r : subtract(piece, hit)) rest.push_back(r);
    }
    std::sort(rest.begin(), rest.end(),
              [](RowRange a, RowRange b) { return a.begin < b.begin; });
    left = std::move(rest);
  };
  for (const ExchangeStep& s : plan.steps_from(layer + 1, device)) take(s.rows);
  for (RowRange r : left) chunks.push_back(r);
  return chunks;
}

std::string render_plan_table(const PartitionPlan& plan,
                              const ModelSpec& model) {
  std::string out;
  char line[128];
  if (model.family == ModelFamily::kVgg16) {
    std::snprintf(line, sizeof line, "Task partitioning for %s (z1 = %d)\n",
                  model.name.c_str(), plan.z1);
    out += line;
    std::snprintf(line, sizeof line, "%-8s%6s%6s%6s\n", "Block", "Host", "ED1",
                  "ED2");
    out += line;
    const auto starts = vgg_block_starts(model);
    for (std::size_t b = 0; b < starts.size(); ++b) {
      const PlanLayer& pl = plan.layers.at(starts[b]);
      std::snprintf(line, sizeof line, "Block%-3zu%6d%6d%6d\n", b + 1,
                    pl.host_rows(), pl.ed1_rows(), pl.ed2_rows());
      out += line;
    }
    return out;
  }

  // One row per 3x3 layer: host input rows and the output height of the
  // layer the secondaries split; consecutive identical rows are folded.
  struct Row {
    std::string label;
    int host;
    int height;
    int count;
  };
  std::vector<Row> rows;
  const auto shapes = model.shapes();
  for (int l = 0; l < plan.trunk_size(); ++l) {
    const LayerSpec& spec = model.layers[l];
    if (spec.kind == LayerKind::kPointwiseConv) continue;
    std::string label = spec.kind == LayerKind::kConv ? "Conv /s" : "Conv dw/s";
    label += std::to_string(spec.stride);
    const int host = plan.layers[l].host_rows();
    const int height = shapes[l + 1].height;
    if (!rows.empty() && rows.back().label == label &&
        rows.back().host == host && rows.back().height == height) {
      ++rows.back().count;
    } else {
      rows.push_back({label, host, height, 1});
    }
  }
  std::snprintf(line, sizeof line, "Task partitioning for %s\n",
                model.name.c_str());
  out += line;
  std::snprintf(line, sizeof line, "%-16s%6s%6s%6s\n", "Layers", "Host", "ED1",
                "ED2");
  out += line;
  for (const Row& r : rows) {
    std::string label = r.label;
    if (r.count > 1) label += " x" + std::to_string(r.count);
    std::snprintf(line, sizeof line, "%-16s%6d%6d%6d\n", label.c_str(), r.host,
                  r.height, r.height);
    out += line;
  }
  return out;
}

}  // namespace halp
