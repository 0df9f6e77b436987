# Copyright 2026 The HALP Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Row-partitioned CNN inference across a host and two edge devices."""

import json
from pathlib import Path

from ._core import (
    ModelSpec,
    PartitionPlan,
    PlanError,
    ShapeError,
    TimeoutError,
    TransportError,
    default_plan,
    distributed_infer,
    feasible_vgg_z1,
    max_relative_error,
    mobilenet_v1,
    monolithic_infer,
    offload_choice,
    optimize_plan,
    overlap_recurrence,
    plan_from_json,
    resolve_model,
    vgg16,
    vgg_block_host_rows,
    vgg_plan,
)
from . import _core

__all__ = [
    "ModelSpec",
    "PartitionPlan",
    "PlanError",
    "ShapeError",
    "TimeoutError",
    "TransportError",
    "default_plan",
    "distributed_infer",
    "feasible_vgg_z1",
    "load_catalog",
    "max_relative_error",
    "mobilenet_v1",
    "monolithic_infer",
    "offload_choice",
    "optimize_plan",
    "overlap_recurrence",
    "plan_from_json",
    "reliability",
    "resolve_model",
    "select_model",
    "simulate",
    "vgg16",
    "vgg_block_host_rows",
    "vgg_plan",
]


def simulate(plan, model, mbps=42.0):
    """Simulated timeline with the model family's calibrated timing, as a dict."""
    return json.loads(_core.simulate(plan, model, mbps))


def load_catalog(path):
    return json.loads(_core._load_catalog(str(Path(path))))


def _catalog_text(catalog):
    if isinstance(catalog, (str, Path)):
        return _core._load_catalog(str(catalog))
    if isinstance(catalog, list):
        catalog = {"entries": catalog}
    return json.dumps(catalog)


def select_model(catalog, deadline_ms, image_bytes=300 * 1024, mbps=42.0, mode="halp"):
    """Name of the most accurate entry meeting the deadline, or None."""
    return _core._select_model(_catalog_text(catalog), image_bytes, deadline_ms, mbps, mode)


def reliability(catalog, deadlines_ms, mode="halp", channel="medium", tasks=10000, seed=1):
    return json.loads(
        _core._reliability(_catalog_text(catalog), list(deadlines_ms), mode, channel, tasks, seed)
    )
