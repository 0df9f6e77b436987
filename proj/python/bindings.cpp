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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "halp/errors.hpp"
#include "halp/model_zoo.hpp"
#include "halp/partition.hpp"
#include "halp/runtime.hpp"
#include "halp/sched_sim.hpp"
#include "halp/selector.hpp"
#include "halp/serialization.hpp"

namespace py = pybind11;
using namespace halp;

namespace {

Catalog catalog_from_text(const std::string& text) {
  return catalog_from_json(Json::parse(text));
}

std::string points_json(const std::vector<ReliabilityPoint>& pts) {
  Json out = Json::array();
  for (const auto& p : pts) {
    out.push_back({{"deadline_ms", p.deadline_ms},
                   {"mode", to_string(p.mode)},
                   {"channel", to_string(p.channel)},
                   {"tasks", p.tasks},
                   {"failure_prob", p.failure_prob},
                   {"expected_accuracy", p.expected_accuracy},
                   {"service_reliability", p.service_reliability}});
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<PlanError>(m, "PlanError", PyExc_RuntimeError);
  py::register_exception<TransportError>(m, "TransportError", PyExc_ConnectionError);
  py::register_exception<TimeoutError>(m, "TimeoutError", PyExc_TimeoutError);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_readonly("name", &ModelSpec::name)
      .def_readonly("alpha", &ModelSpec::alpha)
      .def_readonly("rho", &ModelSpec::rho)
      .def_readonly("num_classes", &ModelSpec::num_classes)
      .def_property_readonly("trunk_size", &ModelSpec::trunk_size)
      .def_property_readonly("num_layers", [](const ModelSpec& s) { return s.layers.size(); })
      .def_property_readonly("macs", [](const ModelSpec& s) { return count_macs(s).total; })
      .def("to_json", [](const ModelSpec& s) { return to_json(s).dump(); })
      .def("__repr__", [](const ModelSpec& s) { return "<ModelSpec " + s.name + ">"; });

  py::class_<PartitionPlan>(m, "PartitionPlan")
      .def_readonly("model_name", &PartitionPlan::model_name)
      .def_readonly("z1", &PartitionPlan::z1)
      .def_property_readonly("num_exchanges", [](const PartitionPlan& p) { return p.exchanges.size(); })
      .def("to_json", [](const PartitionPlan& p) { return to_json(p).dump(); })
      .def("table", &render_plan_table, py::arg("model"))
      .def("violations", &validate_plan, py::arg("model"));

  m.def("vgg16", &build_vgg16, py::arg("base_width") = kVggBaseWidth,
        py::arg("num_classes") = kDefaultClasses);
  m.def("mobilenet_v1", &build_mobilenet_v1, py::arg("alpha"), py::arg("rho"),
        py::arg("num_classes") = kDefaultClasses);
  m.def("resolve_model", &resolve_model, py::arg("name"), py::arg("alpha") = 1.0,
        py::arg("rho") = 224, py::arg("base_width") = kVggBaseWidth,
        py::arg("num_classes") = kDefaultClasses);

  m.def("overlap_recurrence", &overlap_recurrence);
  m.def("vgg_block_host_rows", &vgg_block_host_rows, py::arg("z1"), py::arg("blocks") = 5);
  m.def("default_plan", &build_default_plan);
  m.def("vgg_plan", &build_plan_vgg, py::arg("model"), py::arg("z1"));
  m.def("feasible_vgg_z1", &feasible_vgg_z1);
  m.def(
      "optimize_plan",
      [](const ModelSpec& model, double mbps) {
        return optimize_plan(model, calibrated_timing(model), mbps);
      },
      py::arg("model"), py::arg("mbps") = kReferenceThroughputMbps);
  m.def("plan_from_json", [](const std::string& s) { return plan_from_json(Json::parse(s)); });

  m.def(
      "simulate",
      [](const PartitionPlan& plan, const ModelSpec& model, double mbps) {
        return to_json(simulate(plan, model, calibrated_timing(model), mbps)).dump();
      },
      py::arg("plan"), py::arg("model"), py::arg("mbps") = kReferenceThroughputMbps);

  m.def(
      "monolithic_infer",
      [](const ModelSpec& model, std::uint64_t seed, std::uint64_t input_seed) {
        py::gil_scoped_release release;
        return monolithic_infer(model, make_weights(model, seed), make_input(model, input_seed));
      },
      py::arg("model"), py::arg("seed") = 0, py::arg("input_seed") = 1);
  m.def(
      "distributed_infer",
      [](const ModelSpec& model, const PartitionPlan& plan, std::uint64_t seed,
         std::uint64_t input_seed, bool raw_image) {
        RunOptions o;
        if (raw_image) o.offload = OffloadChoice::kRawImage;
        DistributedResult r;
        {
          py::gil_scoped_release release;
          r = run_distributed_inprocess(model, make_weights(model, seed), plan,
                                        make_input(model, input_seed), o);
        }
        py::dict d;
        d["output"] = r.output;
        d["frames"] = r.data_frames;
        d["bytes"] = r.bytes;
        return d;
      },
      py::arg("model"), py::arg("plan"), py::arg("seed") = 0, py::arg("input_seed") = 1,
      py::arg("raw_image") = false);
  m.def("max_relative_error", [](const std::vector<float>& a, const std::vector<float>& b) {
    return max_relative_error(a, b);
  });

  m.def(
      "offload_choice",
      [](std::int64_t bits, int rows, int width, int channels) {
        return std::string(to_string(offload_choice(bits, rows, width, channels)));
      },
      py::arg("image_bits"), py::arg("rows"), py::arg("width"), py::arg("channels"));

  m.def("_load_catalog", [](const std::string& path) { return to_json(load_catalog(path)).dump(); });
  m.def(
      "_select_model",
      [](const std::string& catalog, double image_bytes, double deadline_ms, double mbps,
         const std::string& mode) -> std::optional<std::string> {
        const Catalog c = catalog_from_text(catalog);
        const auto pick = select_model(c.entries, {image_bytes, deadline_ms, mbps},
                                       mode_from_string(mode));
        if (!pick) return std::nullopt;
        return c.entries[*pick].name;
      });
  m.def("_reliability", [](const std::string& catalog, const std::vector<double>& deadlines,
                           const std::string& mode, const std::string& channel, int tasks,
                           std::uint64_t seed) {
    const Catalog c = catalog_from_text(catalog);
    ReliabilityConfig cfg;
    cfg.deadlines_ms = deadlines;
    cfg.mode = mode_from_string(mode);
    cfg.channel = channel_state_from_string(channel);
    cfg.tasks = tasks;
    cfg.seed = seed;
    std::vector<ReliabilityPoint> pts;
    {
      py::gil_scoped_release release;
      pts = run_reliability(c.entries, cfg);
    }
    return points_json(pts);
  });
}
