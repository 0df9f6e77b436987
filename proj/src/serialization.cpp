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

#include "halp/serialization.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "halp/errors.hpp"

namespace halp {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

Json range_json(RowRange r) { return Json::array({r.begin, r.end}); }

RowRange range_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("row range must be [begin, end)");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

ModelSpec resolve_model(std::string_view name, double alpha, int rho,
                        int base_width, int num_classes) {
  const std::string n = lower(name);
  if (n == "vgg16" || n == "vgg-16" || n == "vgg") {
    return build_vgg16(base_width, num_classes);
  }
  if (n == "mobilenet" || n == "mobilenet_v1" || n == "mobilenetv1") {
    return build_mobilenet_v1(alpha, rho, num_classes);
  }
  // MobileNet_v1_<alpha>_<rho>
  const std::string prefix = "mobilenet_v1_";
  if (n.rfind(prefix, 0) == 0) {
    const std::string rest = n.substr(prefix.size());
    const auto us = rest.find('_');
    if (us != std::string::npos) {
      try {
        return build_mobilenet_v1(std::stod(rest.substr(0, us)),
                                  std::stoi(rest.substr(us + 1)), num_classes);
      } catch (const std::logic_error&) {
      }
    }
  }
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

Json to_json(const LayerSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"kernel", {s.kernel_h, s.kernel_w}},
          {"stride", s.stride},
          {"padding", s.padding},
          {"in_channels", s.in_channels},
          {"out_channels", s.out_channels},
          {"activation", s.activation == Activation::kReLU ? "relu" : "none"}};
}

Json to_json(const ModelSpec& m) {
  Json layers = Json::array();
  for (const LayerSpec& l : m.layers) layers.push_back(to_json(l));
  Json j = {{"name", m.name},
            {"family", m.family == ModelFamily::kVgg16 ? "vgg16" : "mobilenet_v1"},
            {"input", {m.input.height, m.input.width, m.input.channels}},
            {"num_classes", m.num_classes},
            {"layers", std::move(layers)}};
  if (m.family == ModelFamily::kVgg16) {
    j["base_width"] = m.base_width;
  } else {
    j["alpha"] = m.alpha;
    j["rho"] = m.rho;
  }
  return j;
}

ModelSpec model_from_json(const Json& j) {
  const std::string family = j.at("family").get<std::string>();
  const int classes = j.value("num_classes", kDefaultClasses);
  ModelSpec m;
  if (family == "vgg16") {
    m = build_vgg16(j.value("base_width", kVggBaseWidth), classes);
  } else if (family == "mobilenet_v1") {
    m = build_mobilenet_v1(j.at("alpha").get<double>(), j.at("rho").get<int>(),
                           classes);
  } else {
    throw std::invalid_argument("unknown model family '" + family + "'");
  }
  if (j.contains("layers")) {
    const Json& layers = j["layers"];
    if (layers.size() != m.layers.size()) {
      throw ShapeError("layer list does not match " + m.name);
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i] != to_json(m.layers[i])) {
        throw ShapeError("layer " + std::to_string(i) + " does not match " +
                         m.name);
      }
    }
  }
  return m;
}

Json to_json(const PartitionPlan& p) {
  Json layers = Json::array();
  for (const PlanLayer& l : p.layers) {
    layers.push_back({{"layer_index", l.layer_index},
                      {"host_rows", l.host_rows()},
                      {"ed1_rows", l.ed1_rows()},
                      {"ed2_rows", l.ed2_rows()},
                      {"host_row_range", range_json(l.input[0])},
                      {"ed1_row_range", range_json(l.input[1])},
                      {"ed2_row_range", range_json(l.input[2])},
                      {"host_output", range_json(l.output[0])},
                      {"ed1_output", range_json(l.output[1])},
                      {"ed2_output", range_json(l.output[2])}});
  }
  Json steps = Json::array();
  for (const ExchangeStep& s : p.exchanges) {
    steps.push_back({{"before_layer", s.before_layer},
                     {"sender", std::string(to_string(s.sender))},
                     {"receiver", std::string(to_string(s.receiver))},
                     {"row_range", range_json(s.rows)},
                     {"channels", s.channels}});
  }
  return {{"model", p.model_name},
          {"z1", p.z1},
          {"layers", std::move(layers)},
          {"exchange_schedule", std::move(steps)}};
}

PartitionPlan plan_from_json(const Json& j) {
  PartitionPlan p;
  p.model_name = j.at("model").get<std::string>();
  p.z1 = j.value("z1", 0);
  static const char* kIn[] = {"host_row_range", "ed1_row_range", "ed2_row_range"};
  static const char* kOut[] = {"host_output", "ed1_output", "ed2_output"};
  for (const Json& l : j.at("layers")) {
    PlanLayer pl;
    pl.layer_index = l.at("layer_index").get<int>();
    for (int d = 0; d < kNumDevices; ++d) {
      pl.input[d] = range_from(l.at(kIn[d]));
      pl.output[d] = range_from(l.at(kOut[d]));
    }
    p.layers.push_back(pl);
  }
  for (const Json& s : j.at("exchange_schedule")) {
    ExchangeStep st;
    st.before_layer = s.at("before_layer").get<int>();
    st.sender = device_from_string(s.at("sender").get<std::string>());
    st.receiver = device_from_string(s.at("receiver").get<std::string>());
    st.rows = range_from(s.at("row_range"));
    st.channels = s.at("channels").get<int>();
    p.exchanges.push_back(st);
  }
  return p;
}

Json to_json(const TimingModel& t) {
  return {{"mac_rate", t.mac_rate},
          {"layer_overhead_s", t.layer_overhead_s},
          {"fixed_fraction", t.fixed_fraction}};
}

TimingModel timing_from_json(const Json& j) {
  TimingModel t;
  t.mac_rate = j.at("mac_rate").get<double>();
  t.layer_overhead_s = j.value("layer_overhead_s", 0.0);
  t.fixed_fraction = j.value("fixed_fraction", 1.0);
  if (!(t.mac_rate > 0) || t.layer_overhead_s < 0 || t.fixed_fraction < 0 ||
      t.fixed_fraction > 1) {
    throw std::invalid_argument("invalid timing model");
  }
  return t;
}

Json to_json(const ChannelModel& c) {
  if (c.is_fixed()) return {{"mbps", c.lo_mbps}};
  return {{"uniform", {c.lo_mbps, c.hi_mbps}}};
}

ChannelModel channel_from_json(const Json& j) {
  if (j.contains("mbps")) {
    const double r = j["mbps"].get<double>();
    return ChannelModel::uniform(r, r);
  }
  const Json& u = j.at("uniform");
  return ChannelModel::uniform(u.at(0).get<double>(), u.at(1).get<double>());
}

Json to_json(const Timeline& t) {
  Json iv = Json::array();
  for (const Interval& i : t.intervals) {
    Json e = {{"node", std::string(to_string(i.node))},
              {"kind", std::string(to_string(i.kind))},
              {"layer", i.layer},
              {"start_ms", i.start * 1e3},
              {"end_ms", i.end * 1e3}};
    if (!i.rows.empty()) e["rows"] = range_json(i.rows);
    if (i.kind == IntervalKind::kSend || i.kind == IntervalKind::kRecv) {
      e["peer"] = std::string(to_string(i.peer));
    }
    iv.push_back(std::move(e));
  }
  return {{"makespan_ms", t.makespan * 1e3},
          {"standalone_ms", t.standalone * 1e3},
          {"gain", t.gain()},
          {"intervals", std::move(iv)}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace halp
