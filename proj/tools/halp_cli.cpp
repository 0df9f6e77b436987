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

// Command-line entry point: plan, infer, simulate, calibrate, reliability.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "halp/errors.hpp"
#include "halp/runtime.hpp"
#include "halp/sched_sim.hpp"
#include "halp/selector.hpp"
#include "halp/serialization.hpp"

namespace {

using namespace halp;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;
constexpr int kVerifyFailed = 3;
constexpr double kEquivalenceTolerance = 1e-5;

struct ModelArgs {
  std::string name;
  double alpha = 1.0;
  int rho = 224;
  int base_width = kVggBaseWidth;
  int classes = kDefaultClasses;

  void add_to(CLI::App* cmd, bool positional = true) {
    if (positional) {
      cmd->add_option("model", name, "vgg16, mobilenet or a full model name")->required();
    }
    cmd->add_option("--alpha", alpha, "MobileNet width multiplier");
    cmd->add_option("--rho", rho, "MobileNet input resolution");
    cmd->add_option("--base-width", base_width, "VGG-16 first-block channels");
    cmd->add_option("--classes", classes, "classifier outputs");
  }
  ModelSpec build() const { return resolve_model(name, alpha, rho, base_width, classes); }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

PartitionPlan load_or_build_plan(const ModelSpec& model, const std::string& path,
                                 std::optional<int> z1) {
  PartitionPlan plan;
  if (!path.empty()) {
    plan = plan_from_json(read_json_file(path));
  } else if (z1) {
    plan = build_plan_vgg(model, *z1);
  } else {
    return build_default_plan(model);
  }
  const auto problems = validate_plan(plan, model);
  if (!problems.empty()) throw PlanError("invalid plan: " + problems.front());
  return plan;
}

TimingModel load_timing(const std::string& path, const ModelSpec& model) {
  if (path.empty()) return calibrated_timing(model);
  const Json j = read_json_file(path);
  return timing_from_json(j.contains("timing") ? j["timing"] : j);
}

std::vector<double> parse_deadlines(const std::string& spec) {
  // "375,425,500" or "375:1800:25"
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0 || hi < lo) {
      throw std::invalid_argument("deadline range must be lo:hi:step");
    }
    const int n = static_cast<int>((hi - lo) / step + 1e-9);
    for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(std::stod(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("no deadlines given");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Host-assisted layer-wise parallel CNN inference toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  app.add_option("-o,--out", out_path, "write the result here instead of stdout");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Build a row partition plan");
  ModelArgs plan_model;
  plan_model.add_to(plan_cmd);
  bool plan_optimize = false, plan_json = false;
  double plan_rate = kReferenceThroughputMbps;
  std::optional<int> plan_z1;
  std::string plan_calibration;
  plan_cmd->add_flag("--optimize", plan_optimize, "search z1 for the smallest simulated makespan");
  plan_cmd->add_option("--rate", plan_rate, "throughput in Mbps for --optimize")->check(CLI::PositiveNumber);
  plan_cmd->add_option("--z1", plan_z1, "host rows of the first VGG block");
  plan_cmd->add_option("--calibration", plan_calibration, "timing model JSON for --optimize");
  plan_cmd->add_flag("--json", plan_json, "emit the plan as JSON");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "Run inference");
  ModelArgs infer_model;
  infer_model.name = "vgg16";
  infer_cmd->add_option("model", infer_model.name, "vgg16, mobilenet or a full model name");
  infer_model.add_to(infer_cmd, false);
  bool infer_local = false, infer_verify = false, infer_json = false;
  std::string infer_role, infer_config, infer_plan, infer_listen, infer_ed1, infer_ed2, infer_log;
  std::uint64_t infer_seed = 0;
  std::int64_t infer_timeout = 30000;
  std::optional<int> infer_z1;
  std::optional<double> infer_image_kbits;
  auto* local_flag = infer_cmd->add_flag("--local", infer_local, "monolithic inference on this node");
  auto* verify_flag = infer_cmd->add_flag("--verify", infer_verify, "run in-process HALP and compare with the monolithic output");
  auto* role_opt = infer_cmd->add_option("--role", infer_role, "host, ed1 or ed2")
                       ->check(CLI::IsMember({"host", "ed1", "ed2"}));
  local_flag->excludes(verify_flag)->excludes(role_opt);
  verify_flag->excludes(role_opt);
  infer_cmd->add_option("--config", infer_config, "node config JSON");
  infer_cmd->add_option("--plan", infer_plan, "plan JSON");
  infer_cmd->add_option("--z1", infer_z1, "VGG plan with this z1");
  infer_cmd->add_option("--listen", infer_listen, "secondary listen address host:port");
  infer_cmd->add_option("--ed1", infer_ed1, "ED1 address host:port");
  infer_cmd->add_option("--ed2", infer_ed2, "ED2 address host:port");
  infer_cmd->add_option("--seed", infer_seed, "weight seed (input uses seed + 1)");
  infer_cmd->add_option("--timeout", infer_timeout, "session timeout in ms")->check(CLI::PositiveNumber);
  infer_cmd->add_option("--event-log", infer_log, "write the event log (JSONL) here");
  infer_cmd->add_option("--image-kbits", infer_image_kbits,
                        "encoded image size; picks raw-image or tensor offload");
  infer_cmd->add_flag("--json", infer_json, "emit the output vector as JSON");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the HALP schedule");
  ModelArgs sim_model;
  sim_model.add_to(sim_cmd);
  std::string sim_plan, sim_calibration;
  std::optional<int> sim_z1;
  bool sim_optimize = false, sim_csv = false, sim_json = false;
  double sim_rate = kReferenceThroughputMbps;
  sim_cmd->add_option("--plan", sim_plan, "plan JSON");
  sim_cmd->add_option("--z1", sim_z1, "VGG plan with this z1");
  sim_cmd->add_flag("--optimize", sim_optimize, "use the optimized plan");
  sim_cmd->add_option("--rate", sim_rate, "throughput in Mbps")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--calibration", sim_calibration, "timing model JSON");
  sim_cmd->add_flag("--csv", sim_csv, "emit the timeline as CSV");
  sim_cmd->add_flag("--json", sim_json, "emit the timeline as JSON");

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit the timing model to the reference times");
  std::string cal_family = "vgg16";
  bool cal_json = false;
  cal_cmd->add_option("family", cal_family, "vgg16 or mobilenet")
      ->check(CLI::IsMember({"vgg16", "mobilenet"}));
  cal_cmd->add_flag("--json", cal_json, "emit JSON");

  // reliability
  auto* rel_cmd = app.add_subcommand("reliability", "Monte Carlo deadline reliability");
  std::string rel_catalog = "data/catalog.json", rel_deadlines = "375:1800:25";
  std::vector<std::string> rel_channels{"poor", "medium", "good"};
  std::vector<std::string> rel_modes{"standalone", "halp"};
  ReliabilityConfig rel;
  bool rel_json = false;
  rel_cmd->add_option("--catalog", rel_catalog, "catalog JSON");
  rel_cmd->add_option("--channel", rel_channels, "poor, medium and/or good");
  rel_cmd->add_option("--mode", rel_modes, "standalone and/or halp");
  rel_cmd->add_option("--deadlines", rel_deadlines, "comma list or lo:hi:step in ms");
  rel_cmd->add_option("--tasks", rel.tasks, "tasks per point")->check(CLI::PositiveNumber);
  rel_cmd->add_option("--seed", rel.seed, "random seed");
  rel_cmd->add_option("--threads", rel.threads, "worker threads (0: all cores)");
  rel_cmd->add_flag("--csv", "CSV output (default)");
  rel_cmd->add_flag("--json", rel_json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (plan_cmd->parsed()) {
    const ModelSpec model = plan_model.build();
    PartitionPlan plan;
    if (plan_optimize) {
      plan = optimize_plan(model, load_timing(plan_calibration, model), plan_rate);
    } else {
      plan = load_or_build_plan(model, "", plan_z1);
    }
    emit(plan_json ? to_json(plan).dump(2) + "\n" : render_plan_table(plan, model), out_path);
    return kOk;
  }

  if (infer_cmd->parsed()) {
    RunOptions opts;
    opts.timeout = std::chrono::milliseconds(infer_timeout);
    EventLog log;
    if (!infer_log.empty()) opts.log = &log;
    if (!infer_config.empty()) {
      std::ifstream in(infer_config);
      if (!in) throw std::invalid_argument("cannot open " + infer_config);
      const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const NodeConfig c = node_config_from_json(text);
      infer_role = std::string(to_string(c.role));
      infer_listen = c.listen;
      infer_ed1 = c.ed1;
      infer_ed2 = c.ed2;
      infer_model.name = c.model;
      infer_model.alpha = c.alpha;
      infer_model.rho = c.rho;
      infer_model.base_width = c.base_width;
      infer_model.classes = c.num_classes;
      infer_plan = c.plan_path;
      infer_seed = c.seed;
      opts.timeout = std::chrono::milliseconds(c.timeout_ms);
      if (!c.event_log.empty()) {
        infer_log = c.event_log;
        opts.log = &log;
      }
    }
    auto write_log = [&] {
      if (!infer_log.empty()) write_text_file(infer_log, log.to_jsonl());
    };

    if (infer_role == "ed1" || infer_role == "ed2") {
      if (infer_listen.empty()) throw std::invalid_argument("--listen is required for a secondary");
      secondary_session(device_from_string(infer_role), infer_listen, opts);
      write_log();
      std::cerr << infer_role << ": session complete\n";
      return kOk;
    }

    const ModelSpec model = infer_model.build();
    const Tensor input = make_input(model, infer_seed + 1);
    if (infer_image_kbits) {
      const int seg = model.input.height / 2;
      opts.offload = offload_choice(static_cast<std::int64_t>(*infer_image_kbits * 1024 * 8), seg,
                                    model.input.width, model.input.channels);
    }
    std::vector<float> output;
    if (infer_role == "host") {
      if (infer_ed1.empty() || infer_ed2.empty()) {
        throw std::invalid_argument("--ed1 and --ed2 are required for the host");
      }
      const PartitionPlan plan = load_or_build_plan(model, infer_plan, infer_z1);
      output = host_session(model, plan, infer_seed, input, infer_ed1, infer_ed2, opts);
      write_log();
    } else if (infer_verify) {
      const PartitionPlan plan = load_or_build_plan(model, infer_plan, infer_z1);
      const ModelWeights weights = make_weights(model, infer_seed);
      const std::vector<float> ref = monolithic_infer(model, weights, input);
      const DistributedResult dist = run_distributed_inprocess(model, weights, plan, input, opts);
      write_log();
      const double err = max_relative_error(dist.output, ref);
      if (dist.output.size() != ref.size() || !(err <= kEquivalenceTolerance)) {
        std::printf("NOT equivalent (max rel err %.3g > 1e-5)\n", err);
        return kVerifyFailed;
      }
      std::printf("equivalent (max rel err ≤ 1e-5): %s, max rel err %.3g, %llu frames\n",
                  model.name.c_str(), err, static_cast<unsigned long long>(dist.data_frames));
      return kOk;
    } else {
      output = monolithic_infer(model, make_weights(model, infer_seed), input);
    }
    std::string text;
    if (infer_json) {
      text = Json{{"model", model.name}, {"output", output}}.dump() + "\n";
    } else {
      for (std::size_t i = 0; i < output.size(); ++i) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%zu %.9g\n", i, output[i]);
        text += buf;
      }
    }
    emit(text, out_path);
    return kOk;
  }

  if (sim_cmd->parsed()) {
    const ModelSpec model = sim_model.build();
    const TimingModel timing = load_timing(sim_calibration, model);
    const PartitionPlan plan = sim_optimize ? optimize_plan(model, timing, sim_rate)
                                            : load_or_build_plan(model, sim_plan, sim_z1);
    const Timeline tl = simulate(plan, model, timing, sim_rate);
    if (sim_csv) {
      emit(timeline_csv(tl), out_path);
    } else if (sim_json) {
      emit(to_json(tl).dump(2) + "\n", out_path);
    } else {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "model %s\nplan %s\nrate %g Mbps\nstandalone %.1f ms\nmakespan %.1f ms\ngain %.3f\n",
                    model.name.c_str(),
                    plan.z1 ? ("z1=" + std::to_string(plan.z1)).c_str() : "default", sim_rate,
                    tl.standalone * 1e3, tl.makespan * 1e3, tl.gain());
      emit(buf, out_path);
    }
    return kOk;
  }

  if (cal_cmd->parsed()) {
    const Calibration c = cal_family == "vgg16" ? calibrate_vgg16(build_vgg16())
                                                : calibrate_mobilenet();
    if (cal_json) {
      Json points = Json::array();
      for (const auto& p : c.points) {
        points.push_back({{"label", p.label}, {"measured_ms", p.measured_ms}, {"model_ms", p.model_ms}});
      }
      emit(Json{{"timing", to_json(c.timing)},
                {"points", points},
                {"max_relative_residual", c.max_relative_residual()}}
                   .dump(2) + "\n",
           out_path);
    } else {
      std::string text;
      char buf[160];
      std::snprintf(buf, sizeof buf, "mac_rate %.6g MAC/s\nlayer_overhead %.4f ms\nfixed_fraction %.4f\n",
                    c.timing.mac_rate, c.timing.layer_overhead_s * 1e3, c.timing.fixed_fraction);
      text += buf;
      for (const auto& p : c.points) {
        std::snprintf(buf, sizeof buf, "%-36s %8.1f %8.1f %+6.1f%%\n", p.label.c_str(), p.measured_ms,
                      p.model_ms, 100.0 * (p.model_ms - p.measured_ms) / p.measured_ms);
        text += buf;
      }
      emit(text, out_path);
    }
    return kOk;
  }

  // reliability
  const Catalog catalog = load_catalog(rel_catalog);
  rel.deadlines_ms = parse_deadlines(rel_deadlines);
  std::vector<ReliabilityPoint> points;
  for (const std::string& m : rel_modes) {
    for (const std::string& ch : rel_channels) {
      rel.mode = mode_from_string(m);
      rel.channel = channel_state_from_string(ch);
      const auto pts = run_reliability(catalog.entries, rel);
      points.insert(points.end(), pts.begin(), pts.end());
    }
  }
  if (rel_json) {
    Json arr = Json::array();
    for (const auto& p : points) {
      arr.push_back({{"deadline_ms", p.deadline_ms},
                     {"mode", std::string(to_string(p.mode))},
                     {"channel", std::string(to_string(p.channel))},
                     {"tasks", p.tasks},
                     {"failure_prob", p.failure_prob},
                     {"expected_accuracy", p.expected_accuracy},
                     {"reliability", p.service_reliability}});
    }
    emit(arr.dump(2) + "\n", out_path);
  } else {
    emit(reliability_csv(points), out_path);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const TransportError& e) {
    std::cerr << "error: " << e.what()
              << "\n  check that the secondaries are running and reachable, or raise --timeout\n";
    return kRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
