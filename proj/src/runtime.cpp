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

#include "halp/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <thread>
#include <tuple>

#include "halp/errors.hpp"
#include "halp/frame.hpp"
#include "halp/kernels.hpp"
#include "halp/serialization.hpp"

namespace halp {

std::string_view to_string(OffloadChoice c) {
  return c == OffloadChoice::kRawImage ? "raw_image" : "half_tensor";
}

OffloadChoice offload_choice(std::int64_t image_size_bits, int segment_rows,
                             int width, int channels) {
  if (image_size_bits < 0 || segment_rows <= 0 || width <= 0 || channels <= 0) {
    throw std::invalid_argument("offload_choice needs positive dimensions");
  }
  const std::int64_t tensor_bits =
      std::int64_t{segment_rows} * width * channels * 32;
  return image_size_bits < tensor_bits ? OffloadChoice::kRawImage
                                       : OffloadChoice::kHalfTensor;
}

Tensor monolithic_trunk(const ModelSpec& model, const ModelWeights& weights,
                        const Tensor& input) {
  const auto shapes = model.shapes();
  if (input.height() != model.input.height || input.width() != model.input.width ||
      input.channels() != model.input.channels || input.row_offset() != 0) {
    throw ShapeError("input does not match " + model.name);
  }
  if (weights.size() != model.layers.size()) {
    throw ShapeError("weight count does not match " + model.name);
  }
  Tensor cur = input;
  for (int l = 0; l < model.trunk_size(); ++l) {
    const int out_h = shapes[l + 1].height;
    cur = compute_rows(model.layers[l], weights[l], cur, shapes[l].height,
                       {0, out_h});
  }
  return cur;
}

std::vector<float> run_head(const ModelSpec& model, const ModelWeights& weights,
                            const Tensor& trunk_output) {
  const int trunk = model.trunk_size();
  const auto shapes = model.shapes();
  if (trunk_output.row_offset() != 0 ||
      trunk_output.height() != shapes[trunk].height ||
      trunk_output.width() != shapes[trunk].width ||
      trunk_output.channels() != shapes[trunk].channels) {
    throw ShapeError("trunk output does not match " + model.name);
  }
  std::vector<float> v(trunk_output.data().begin(), trunk_output.data().end());
  bool flat = false;
  for (std::size_t l = trunk; l < model.layers.size(); ++l) {
    const LayerSpec& spec = model.layers[l];
    if (spec.kind == LayerKind::kGlobalAvgPool) {
      if (flat) throw ShapeError("global pooling after flattening");
      v = global_avg_pool(trunk_output);
    } else if (spec.kind == LayerKind::kFullyConnected) {
      v = fully_connected(v, spec, weights[l]);
    } else {
      throw ShapeError("unsupported head layer " + std::string(to_string(spec.kind)));
    }
    flat = true;
  }
  return v;
}

std::vector<float> monolithic_infer(const ModelSpec& model,
                                    const ModelWeights& weights,
                                    const Tensor& input) {
  return run_head(model, weights, monolithic_trunk(model, weights, input));
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kComputeStart:
      return "compute_start";
    case EventKind::kComputeEnd:
      return "compute_end";
    case EventKind::kSend:
      return "send";
    case EventKind::kRecv:
      return "recv";
  }
  return "?";
}

void EventLog::append(const Event& e) {
  std::lock_guard<std::mutex> lock(mu_);
  events_.push_back(e);
}

std::vector<Event> EventLog::events() const {
  std::lock_guard<std::mutex> lock(mu_);
  return events_;
}

void EventLog::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  events_.clear();
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const Event& e : events()) {
    nlohmann::ordered_json j = {{"t_ns", e.t_ns},
              {"node", std::string(to_string(e.node))},
              {"event", std::string(to_string(e.kind))},
              {"layer", e.layer},
              {"rows", {e.rows.begin, e.rows.end}}};
    if (e.kind == EventKind::kSend || e.kind == EventKind::kRecv) {
      j["peer"] = std::string(to_string(e.peer));
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

// Transport workers of one node. The compute worker hands frames to a
// per-peer sender thread and takes received frames from an inbox that
// per-peer receiver threads fill.
class Node {
 public:
  Node(Device self, const std::vector<Peer>& peers, const RunOptions& opts)
      : self_(self),
        opts_(opts),
        start_(Clock::now()),
        deadline_(start_ + opts.timeout) {
    for (const Peer& p : peers) {
      auto link = std::make_unique<Link>();
      link->device = p.device;
      link->transport = p.link;
      links_.push_back(std::move(link));
    }
    for (auto& l : links_) {
      Link* link = l.get();
      link->rx = std::thread([this, link] { receive_loop(*link); });
      link->tx = std::thread([this, link] { send_loop(*link); });
    }
  }

  ~Node() {
    if (!finished_) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        closing_ = true;
      }
      cv_.notify_all();
      for (auto& l : links_) l->transport->abort();
    }
    for (auto& l : links_) {
      if (l->tx.joinable()) l->tx.join();
      if (l->rx.joinable()) l->rx.join();
    }
  }

  Device self() const { return self_; }
  Clock::time_point deadline() const { return deadline_; }

  void log(EventKind kind, int layer, RowRange rows, Device peer) {
    if (!opts_.log) return;
    Event e;
    e.t_ns = opts_.clock == ClockMode::kLogical
                 ? ++counter_
                 : std::chrono::duration_cast<std::chrono::nanoseconds>(
                       Clock::now() - start_)
                       .count();
    e.node = self_;
    e.kind = kind;
    e.layer = layer;
    e.rows = rows;
    e.peer = peer;
    opts_.log->append(e);
  }

  void send(Device to, Frame frame, int layer, RowRange rows) {
    Link& link = find(to);
    log(EventKind::kSend, layer, rows, to);
    {
      std::lock_guard<std::mutex> lock(mu_);
      rethrow_locked();
      link.out.push_back(std::move(frame));
    }
    cv_.notify_all();
  }

  Frame take(Device from, std::uint16_t layer, int row_start, RowRange rows) {
    const Key key{layer, static_cast<int>(from), row_start};
    std::unique_lock<std::mutex> lock(mu_);
    Link& link = find(from);
    for (;;) {
      auto it = inbox_.find(key);
      if (it != inbox_.end()) {
        Frame f = std::move(it->second);
        inbox_.erase(it);
        lock.unlock();
        log(EventKind::kRecv, layer == kRawImageLayer ? 0 : layer, rows, from);
        return f;
      }
      rethrow_locked();
      if (link.peer_closed) {
        throw TransportError(std::string(to_string(from)) +
                             " closed before sending layer " +
                             std::to_string(layer) + " rows from " +
                             std::to_string(row_start));
      }
      if (cv_.wait_until(lock, deadline_) == std::cv_status::timeout &&
          inbox_.find(key) == inbox_.end()) {
        throw TimeoutError(std::string(to_string(self_)) +
                           ": timed out waiting for " +
                           std::string(to_string(from)));
      }
    }
  }

  // Flushes queued frames, closes our side of every link and waits for the
  // peers to close theirs.
  void finish() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      closing_ = true;
    }
    cv_.notify_all();
    for (auto& l : links_) l->tx.join();
    for (auto& l : links_) l->transport->close();
    for (auto& l : links_) l->rx.join();
    finished_ = true;
    std::lock_guard<std::mutex> lock(mu_);
    rethrow_locked();
    if (!inbox_.empty()) {
      const auto& [layer, sender, row] = inbox_.begin()->first;
      throw PlanError(std::string(to_string(self_)) + " received an unplanned frame (layer " +
                      std::to_string(layer) + ", sender " + std::to_string(sender) +
                      ", row " + std::to_string(row) + ")");
    }
  }

  std::uint64_t frames_sent() const {
    std::uint64_t n = 0;
    for (const auto& l : links_) n += l->transport->frames_sent();
    return n;
  }
  std::uint64_t bytes_sent() const {
    std::uint64_t n = 0;
    for (const auto& l : links_) n += l->transport->bytes_sent();
    return n;
  }

 private:
  using Key = std::tuple<int, int, int>;  // layer, sender, row_start

  struct Link {
    Device device;
    Transport* transport = nullptr;
    std::deque<Frame> out;
    bool peer_closed = false;
    std::thread rx, tx;
  };

  Link& find(Device d) {
    for (auto& l : links_) {
      if (l->device == d) return *l;
    }
    throw PlanError(std::string(to_string(self_)) + " has no link to " +
                    std::string(to_string(d)));
  }

  void rethrow_locked() {
    if (error_) std::rethrow_exception(error_);
  }

  void fail(std::exception_ptr e) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!error_) error_ = e;
    cv_.notify_all();
  }

  void receive_loop(Link& link) {
    for (;;) {
      Frame f;
      try {
        f = link.transport->receive(deadline_);
      } catch (const TimeoutError&) {
        bool closing;
        {
          std::lock_guard<std::mutex> lock(mu_);
          closing = closing_;
        }
        if (!closing) fail(std::current_exception());
        return;
      } catch (const TransportError&) {
        std::lock_guard<std::mutex> lock(mu_);
        link.peer_closed = true;
        cv_.notify_all();
        return;
      } catch (...) {
        fail(std::current_exception());
        return;
      }
      if (f.header.sender != static_cast<std::uint8_t>(link.device)) {
        fail(std::make_exception_ptr(
            FrameError("frame sender does not match its link")));
        return;
      }
      std::lock_guard<std::mutex> lock(mu_);
      inbox_.emplace(Key{f.header.layer_id, f.header.sender, f.header.row_start},
                     std::move(f));
      cv_.notify_all();
    }
  }

  void send_loop(Link& link) {
    for (;;) {
      Frame f;
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return !link.out.empty() || closing_; });
        if (link.out.empty()) return;
        f = std::move(link.out.front());
        link.out.pop_front();
      }
      try {
        link.transport->send(f);
      } catch (...) {
        fail(std::current_exception());
        return;
      }
    }
  }

  Device self_;
  RunOptions opts_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  std::int64_t counter_ = 0;
  std::vector<std::unique_ptr<Link>> links_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<Key, Frame> inbox_;
  bool closing_ = false;
  bool finished_ = false;
  std::exception_ptr error_;
};

Frame rows_frame(std::uint16_t layer, Device sender, const Tensor& band) {
  if (band.row_offset() > 0xFFFF || band.height() > 0xFFFF ||
      band.width() > 0xFFFF || band.channels() > 0xFFFF) {
    throw FrameError("tensor too large for a frame");
  }
  Frame f;
  f.header = {layer,
              static_cast<std::uint8_t>(sender),
              static_cast<std::uint16_t>(band.row_offset()),
              static_cast<std::uint16_t>(band.height()),
              static_cast<std::uint16_t>(band.width()),
              static_cast<std::uint16_t>(band.channels())};
  f.payload.assign(band.data().begin(), band.data().end());
  return f;
}

Tensor frame_tensor(Frame&& f, const FeatureShape& shape) {
  const FrameHeader& h = f.header;
  if (h.width != shape.width || h.channels != shape.channels ||
      h.row_start + h.row_count > shape.height) {
    throw FrameError("frame shape does not match the feature map");
  }
  return Tensor(h.row_count, h.width, h.channels, std::move(f.payload), h.row_start);
}

const Tensor* holder(const std::vector<Tensor>& pieces, int row) {
  for (const Tensor& t : pieces) {
    if (t.holds_row(row)) return &t;
  }
  return nullptr;
}

bool covers(const std::vector<Tensor>& pieces, RowRange r) {
  for (int row = r.begin; row < r.end; ++row) {
    if (!holder(pieces, row)) return false;
  }
  return true;
}

Tensor assemble(const std::vector<Tensor>& pieces, RowRange r, int width,
                int channels) {
  Tensor band(r.size(), width, channels, r.begin);
  for (int row = r.begin; row < r.end; ++row) {
    const Tensor* src = holder(pieces, row);
    if (!src) throw PlanError("row " + std::to_string(row) + " is missing");
    const auto from = src->row(row);
    std::copy(from.begin(), from.end(), band.row(row).begin());
  }
  return band;
}

// Compute worker shared by host and secondaries. Returns the merged trunk
// output on the host and an empty tensor elsewhere.
Tensor execute(Node& node, const ModelSpec& model, const ModelWeights& weights,
               const PartitionPlan& plan, const Tensor* input,
               const RunOptions& opts) {
  const Device self = node.self();
  const auto shapes = model.shapes();
  const int trunk = model.trunk_size();
  if (plan.trunk_size() != trunk || plan.model_name != model.name) {
    throw PlanError("plan for " + plan.model_name + " does not fit " + model.name);
  }
  if (weights.size() != model.layers.size()) {
    throw ShapeError("weight count does not match " + model.name);
  }

  std::vector<Tensor> held;  // pieces of the current layer's input
  if (self == Device::kHost) {
    held.push_back(*input);
    if (opts.offload == OffloadChoice::kRawImage) {
      for (Device d : kSecondaries) {
        node.send(d, rows_frame(kRawImageLayer, self, *input), 0,
                  {0, input->height()});
      }
    } else {
      for (const ExchangeStep& s : plan.steps_from(0, self)) {
        node.send(s.receiver, rows_frame(0, self, input->slice_rows(s.rows.begin, s.rows.end)),
                  0, s.rows);
      }
    }
  } else if (opts.offload == OffloadChoice::kRawImage) {
    Frame f = node.take(Device::kHost, kRawImageLayer, 0, {0, shapes[0].height});
    held.push_back(frame_tensor(std::move(f), shapes[0]));
  }

  for (int l = 0; l < trunk; ++l) {
    const LayerSpec& spec = model.layers[l];
    const FeatureShape& in = shapes[l];
    const FeatureShape& out = shapes[l + 1];
    std::vector<ExchangeStep> pending;
    if (!(l == 0 && opts.offload == OffloadChoice::kRawImage)) {
      pending = plan.steps_into(l, self);
    }
    std::vector<char> taken(pending.size(), 0);
    auto take_step = [&](std::size_t i) {
      const ExchangeStep& s = pending[i];
      Frame f = node.take(s.sender, static_cast<std::uint16_t>(l), s.rows.begin, s.rows);
      if (f.header.row_count != s.rows.size()) {
        throw FrameError("frame rows do not match the planned step");
      }
      held.push_back(frame_tensor(std::move(f), in));
      taken[i] = 1;
    };

    std::vector<ExchangeStep> outgoing = plan.steps_from(l + 1, self);
    std::vector<char> sent(outgoing.size(), 0);
    std::vector<Tensor> produced;

    for (RowRange chunk : compute_order(plan, self, l)) {
      const RowRange rf = input_rows_for(spec, chunk, in.height);
      while (!covers(held, rf)) {
        std::size_t next = pending.size();
        for (std::size_t i = 0; i < pending.size() && next == pending.size(); ++i) {
          if (!taken[i] && !intersect(pending[i].rows, rf).empty()) next = i;
        }
        if (next == pending.size()) {
          throw PlanError(std::string(to_string(self)) + " lacks input rows of layer " +
                          std::to_string(l));
        }
        take_step(next);
      }
      const Tensor band = assemble(held, rf, in.width, in.channels);
      node.log(EventKind::kComputeStart, l, chunk, self);
      produced.push_back(compute_rows(spec, weights[l], band, in.height, chunk));
      node.log(EventKind::kComputeEnd, l, chunk, self);

      for (std::size_t i = 0; i < outgoing.size(); ++i) {
        const ExchangeStep& s = outgoing[i];
        if (sent[i] || !covers(produced, s.rows)) continue;
        node.send(s.receiver,
                  rows_frame(static_cast<std::uint16_t>(l + 1), self,
                             assemble(produced, s.rows, out.width, out.channels)),
                  l + 1, s.rows);
        sent[i] = 1;
      }
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (!taken[i]) take_step(i);
    }
    for (std::size_t i = 0; i < outgoing.size(); ++i) {
      if (!sent[i]) {
        throw PlanError("step from " + std::string(to_string(self)) +
                        " before layer " + std::to_string(l + 1) +
                        " covers rows it does not compute");
      }
    }
    held = std::move(produced);
  }

  if (self != Device::kHost) return {};
  for (const ExchangeStep& s : plan.steps_into(trunk, self)) {
    Frame f = node.take(s.sender, static_cast<std::uint16_t>(trunk), s.rows.begin, s.rows);
    held.push_back(frame_tensor(std::move(f), shapes[trunk]));
  }
  const FeatureShape& fin = shapes[trunk];
  return assemble(held, {0, fin.height}, fin.width, fin.channels);
}

}  // namespace

std::vector<float> run_host(const ModelSpec& model, const ModelWeights& weights,
                            const PartitionPlan& plan, const Tensor& input,
                            const std::vector<Peer>& peers,
                            const RunOptions& options) {
  if (input.height() != model.input.height || input.width() != model.input.width ||
      input.channels() != model.input.channels || input.row_offset() != 0) {
    throw ShapeError("input does not match " + model.name);
  }
  Node node(Device::kHost, peers, options);
  Tensor merged = execute(node, model, weights, plan, &input, options);
  node.finish();
  return run_head(model, weights, merged);
}

void run_secondary(Device role, const ModelSpec& model,
                   const ModelWeights& weights, const PartitionPlan& plan,
                   const std::vector<Peer>& peers, const RunOptions& options) {
  if (role == Device::kHost) throw std::invalid_argument("run_secondary needs ED1 or ED2");
  Node node(role, peers, options);
  execute(node, model, weights, plan, nullptr, options);
  node.finish();
}

DistributedResult run_distributed_inprocess(const ModelSpec& model,
                                            const ModelWeights& weights,
                                            const PartitionPlan& plan,
                                            const Tensor& input,
                                            RunOptions options, double mbps) {
  // One link per pair of devices that exchange frames.
  bool pair_needed[kNumDevices][kNumDevices] = {};
  pair_needed[0][1] = pair_needed[0][2] = true;
  for (const ExchangeStep& s : plan.exchanges) {
    const int a = std::min(index_of(s.sender), index_of(s.receiver));
    const int b = std::max(index_of(s.sender), index_of(s.receiver));
    pair_needed[a][b] = true;
  }
  std::vector<std::unique_ptr<Transport>> owned;
  std::array<std::vector<Peer>, kNumDevices> peers;
  for (int a = 0; a < kNumDevices; ++a) {
    for (int b = a + 1; b < kNumDevices; ++b) {
      if (!pair_needed[a][b]) continue;
      auto [ta, tb] = make_inprocess_pair(mbps);
      peers[a].push_back({kAllDevices[b], ta.get()});
      peers[b].push_back({kAllDevices[a], tb.get()});
      owned.push_back(std::move(ta));
      owned.push_back(std::move(tb));
    }
  }

  std::array<EventLog, kNumDevices> logs;
  std::array<std::exception_ptr, kNumDevices> errors;
  std::vector<std::thread> workers;
  for (Device d : kSecondaries) {
    workers.emplace_back([&, d] {
      RunOptions o = options;
      o.log = &logs[index_of(d)];
      try {
        run_secondary(d, model, weights, plan, peers[index_of(d)], o);
      } catch (...) {
        errors[index_of(d)] = std::current_exception();
        for (const Peer& p : peers[index_of(d)]) p.link->abort();
      }
    });
  }
  DistributedResult result;
  {
    RunOptions o = options;
    o.log = &logs[0];
    try {
      result.output = run_host(model, weights, plan, input, peers[0], o);
    } catch (...) {
      errors[0] = std::current_exception();
      for (const Peer& p : peers[0]) p.link->abort();
    }
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& log : logs) {
    const auto ev = log.events();
    result.events.insert(result.events.end(), ev.begin(), ev.end());
    if (options.log) {
      for (const Event& e : ev) options.log->append(e);
    }
  }
  for (const auto& t : owned) {
    result.data_frames += t->frames_sent();
    result.bytes += t->bytes_sent();
  }
  return result;
}

NodeConfig node_config_from_json(const std::string& json_text) {
  const Json j = Json::parse(json_text);
  NodeConfig c;
  c.role = device_from_string(j.at("role").get<std::string>());
  c.listen = j.value("listen", "");
  c.ed1 = j.value("ed1", "");
  c.ed2 = j.value("ed2", "");
  c.model = j.value("model", c.model);
  c.alpha = j.value("alpha", c.alpha);
  c.rho = j.value("rho", c.rho);
  c.base_width = j.value("base_width", c.base_width);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.plan_path = j.value("plan", "");
  c.seed = j.value("seed", std::uint64_t{0});
  c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
  c.event_log = j.value("event_log", "");
  if (c.role == Device::kHost && (c.ed1.empty() || c.ed2.empty())) {
    throw std::invalid_argument("host config needs ed1 and ed2 addresses");
  }
  if (c.role != Device::kHost && c.listen.empty()) {
    throw std::invalid_argument("secondary config needs a listen address");
  }
  return c;
}

namespace {

void require_star(const PartitionPlan& plan) {
  for (const ExchangeStep& s : plan.exchanges) {
    if (s.sender != Device::kHost && s.receiver != Device::kHost) {
      throw PlanError("socket sessions only carry host<->secondary steps");
    }
  }
}

}  // namespace

std::vector<float> host_session(const ModelSpec& model, const PartitionPlan& plan,
                                std::uint64_t seed, const Tensor& input,
                                const std::string& ed1_address,
                                const std::string& ed2_address,
                                const RunOptions& options) {
  require_star(plan);
  const auto deadline = Clock::now() + options.timeout;
  const auto [h1, p1] = parse_address(ed1_address);
  const auto [h2, p2] = parse_address(ed2_address);
  std::unique_ptr<Transport> ed1 = tcp_connect(h1, p1, deadline);
  std::unique_ptr<Transport> ed2 = tcp_connect(h2, p2, deadline);
  const Json hello = {{"model", to_json(model)},
                      {"plan", to_json(plan)},
                      {"seed", seed},
                      {"offload", std::string(to_string(options.offload))},
                      {"timeout_ms", options.timeout.count()}};
  const std::string text = hello.dump();
  ed1->send(make_text_frame(kHandshakeLayer, 0, text));
  ed2->send(make_text_frame(kHandshakeLayer, 0, text));
  const ModelWeights weights = make_weights(model, seed);
  return run_host(model, weights, plan, input,
                  {{Device::kEd1, ed1.get()}, {Device::kEd2, ed2.get()}}, options);
}

void secondary_session(Device role, TcpListener& listener,
                       const RunOptions& options) {
  const auto deadline = Clock::now() + options.timeout;
  std::unique_ptr<Transport> host = listener.accept(deadline);
  Frame hello = host->receive(deadline);
  if (hello.header.layer_id != kHandshakeLayer) {
    throw FrameError("expected a handshake frame");
  }
  const Json j = Json::parse(frame_text(hello));
  const ModelSpec model = model_from_json(j.at("model"));
  const PartitionPlan plan = plan_from_json(j.at("plan"));
  require_star(plan);
  const auto problems = validate_plan(plan, model);
  if (!problems.empty()) throw PlanError("handshake plan is invalid: " + problems.front());
  const ModelWeights weights = make_weights(model, j.at("seed").get<std::uint64_t>());
  RunOptions o = options;
  o.offload = j.value("offload", "half_tensor") == "raw_image" ? OffloadChoice::kRawImage
                                                               : OffloadChoice::kHalfTensor;
  run_secondary(role, model, weights, plan, {{Device::kHost, host.get()}}, o);
}

void secondary_session(Device role, const std::string& listen_address,
                       const RunOptions& options) {
  const auto [host, port] = parse_address(listen_address);
  TcpListener listener(host, port);
  secondary_session(role, listener, options);
}

}  // namespace halp
