#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jumps/topology.hpp"

namespace jumps {

enum class MessageKind : std::uint8_t { wake, ddm };

// One broadcast, heard by every neighbor of `sender`. A DDM carries the
// landmark axis it builds and a hop counter: 0 at the originating landmark,
// incremented exactly once per forwarding hop.
struct Message {
  MessageKind kind = MessageKind::wake;
  std::int32_t landmark_index = -1;  // DDM only
  std::int32_t counter = 0;          // DDM only
  NodeId sender = 0;
};

// Per-node protocol state. best_counter[j] is the lowest DDM_j counter seen
// so far (-1 = none) and never increases during a run; coords[j] is the
// resulting hop distance to landmark j (-1 = unknown).
struct NodeState {
  NodeId id = 0;
  bool woken = false;
  std::vector<std::int32_t> best_counter;
  std::vector<std::int32_t> coords;
};

struct FloodStats {
  std::uint64_t emissions = 0;
  std::uint64_t receptions = 0;
};

struct TrafficStats {
  FloodStats wake;
  std::vector<FloodStats> ddm;  // one per landmark, in flood order

  FloodStats total() const {
    FloodStats t = wake;
    for (const FloodStats& f : ddm) {
      t.emissions += f.emissions;
      t.receptions += f.receptions;
    }
    return t;
  }
};

// Landmark woken by a flood; `hop` is its hop distance from the flood origin.
struct FloodTrigger {
  NodeId node = 0;
  std::int32_t hop = 0;
};

struct FloodTrace {
  std::string flood_id;                             // "wake" or "ddm_<k>", 1-based
  std::vector<std::int32_t> emit_round;             // per node: round it forwarded in
                                                    // (== hop distance from origin)
  std::vector<std::vector<NodeId>> round_emitters;  // emitter ids per round
  std::optional<FloodTrigger> trigger;              // next landmark woken by this flood
  FloodStats stats;
};

// Node i's row holds its hop distances to landmarks 0..N-1: the node's
// virtual coordinates.
class CoordinateMatrix {
 public:
  CoordinateMatrix() = default;
  CoordinateMatrix(std::size_t node_count, std::size_t landmark_count)
      : nodes_(node_count),
        landmarks_(landmark_count),
        data_(node_count * landmark_count, -1) {}

  std::size_t node_count() const { return nodes_; }
  std::size_t landmark_count() const { return landmarks_; }

  std::int32_t at(NodeId node, std::size_t landmark) const {
    return data_[node * landmarks_ + landmark];
  }
  std::int32_t& at(NodeId node, std::size_t landmark) {
    return data_[node * landmarks_ + landmark];
  }
  std::span<const std::int32_t> row(NodeId node) const {
    return {data_.data() + node * landmarks_, landmarks_};
  }

  // The matrix restricted to the first `landmark_count` axes, as if only
  // those landmarks had flooded.
  CoordinateMatrix prefix(std::size_t landmark_count) const {
    if (landmark_count > landmarks_) throw std::out_of_range("prefix wider than matrix");
    CoordinateMatrix out(nodes_, landmark_count);
    for (NodeId i = 0; i < nodes_; ++i)
      for (std::size_t j = 0; j < landmark_count; ++j) out.at(i, j) = at(i, j);
    return out;
  }

  bool operator==(const CoordinateMatrix&) const = default;

 private:
  std::size_t nodes_ = 0;
  std::size_t landmarks_ = 0;
  std::vector<std::int32_t> data_;
};

struct ProtocolResult {
  CoordinateMatrix coords;
  TrafficStats traffic;
  std::vector<FloodTrace> traces;  // wake then DDMs; empty unless requested
};

namespace detail {

inline std::vector<NodeState> make_states(const Topology& topo) {
  std::vector<NodeState> states(topo.node_count());
  const std::size_t n_landmarks = topo.landmark_ids().size();
  for (NodeId i = 0; i < states.size(); ++i) {
    states[i].id = i;
    states[i].best_counter.assign(n_landmarks, -1);
    states[i].coords.assign(n_landmarks, -1);
  }
  return states;
}

// Synchronous-round flood: every node that first accepted the message in
// round t-1 broadcasts once in round t, and all round-t receptions are
// processed before round t+1 begins. This realizes the perfect scheduling
// the traffic model assumes, and makes the counter-suppression rule (only a
// strictly improving counter is recorded and forwarded) deliver exact
// minimum hop counts.
inline FloodTrace run_flood(const Topology& topo, std::vector<NodeState>& states,
                            MessageKind kind, std::int32_t landmark_index, NodeId origin,
                            std::int64_t watched_landmark, bool record_rounds) {
  const std::size_t n = topo.node_count();
  FloodTrace trace;
  trace.flood_id = kind == MessageKind::wake
                       ? "wake"
                       : "ddm_" + std::to_string(landmark_index + 1);
  trace.emit_round.assign(n, -1);

  if (kind == MessageKind::wake) {
    states[origin].woken = true;
  } else {
    states[origin].best_counter[landmark_index] = 0;
    states[origin].coords[landmark_index] = 0;
  }
  trace.emit_round[origin] = 0;

  std::vector<Message> current{Message{kind, landmark_index, 0, origin}};
  std::vector<Message> next;
  std::int32_t round = 0;
  while (!current.empty()) {
    if (static_cast<std::size_t>(round) > n)
      throw std::logic_error("flood exceeded its round bound");
    if (record_rounds) {
      std::vector<NodeId> emitters;
      emitters.reserve(current.size());
      for (const Message& msg : current) emitters.push_back(msg.sender);
      std::sort(emitters.begin(), emitters.end());
      trace.round_emitters.push_back(std::move(emitters));
    }
    next.clear();
    for (const Message& msg : current) {
      trace.stats.emissions += 1;
      trace.stats.receptions += topo.degree(msg.sender);
      for (const NodeId v : topo.neighbors(msg.sender)) {
        NodeState& state = states[v];
        bool forward = false;
        if (msg.kind == MessageKind::wake) {
          if (!state.woken) {
            state.woken = true;
            forward = true;
          }
        } else if (state.best_counter[landmark_index] < 0 ||
                   msg.counter < state.best_counter[landmark_index]) {
          state.best_counter[landmark_index] = msg.counter;
          state.coords[landmark_index] = msg.counter + 1;
          forward = true;
        }
        if (forward) {
          trace.emit_round[v] = round + 1;
          next.push_back(Message{kind, landmark_index, msg.counter + 1, v});
        }
      }
    }
    std::swap(current, next);
    ++round;
  }

  if (watched_landmark >= 0) {
    const auto watch = static_cast<NodeId>(watched_landmark);
    if (trace.emit_round[watch] >= 0)
      trace.trigger = FloodTrigger{watch, trace.emit_round[watch]};
  }
  return trace;
}

}  // namespace detail

// Floods the wake-up message from `initiator`. Every node forwards exactly
// once; the trace records per-round emitter sets, each node's wake round and
// the first landmark's trigger.
inline FloodTrace run_wake(const Topology& topo, NodeId initiator) {
  if (initiator >= topo.node_count()) throw std::out_of_range("initiator out of range");
  std::vector<NodeState> states = detail::make_states(topo);
  return detail::run_flood(topo, states, MessageKind::wake, -1, initiator,
                           topo.landmark_ids().front(), true);
}

// Floods DDM_j from landmark j in isolation and returns the per-node hop
// counts along axis j plus the flood trace. The trace's trigger shows the
// flood waking landmark j+1, when one exists.
inline std::pair<std::vector<std::int32_t>, FloodTrace> run_ddm_flood(const Topology& topo,
                                                                      std::size_t landmark_index) {
  const auto& landmarks = topo.landmark_ids();
  if (landmark_index >= landmarks.size()) throw std::out_of_range("landmark index out of range");
  std::vector<NodeState> states = detail::make_states(topo);
  const std::int64_t next_landmark =
      landmark_index + 1 < landmarks.size()
          ? static_cast<std::int64_t>(landmarks[landmark_index + 1])
          : -1;
  FloodTrace trace =
      detail::run_flood(topo, states, MessageKind::ddm, static_cast<std::int32_t>(landmark_index),
                        landmarks[landmark_index], next_landmark, true);
  std::vector<std::int32_t> hops(topo.node_count());
  for (NodeId i = 0; i < hops.size(); ++i) hops[i] = states[i].coords[landmark_index];
  return {std::move(hops), std::move(trace)};
}

// The full coordinate-assignment run: the WAKE flood from `initiator`, then
// one DDM flood per landmark in order, each next landmark woken by its
// predecessor's flood. Returns every node's coordinate vector and the
// cumulative traffic counters.
inline ProtocolResult run_full_protocol(const Topology& topo, NodeId initiator = 0,
                                        bool record_traces = false) {
  if (initiator >= topo.node_count()) throw std::out_of_range("initiator out of range");
  const auto& landmarks = topo.landmark_ids();
  const std::size_t n_landmarks = landmarks.size();

  std::vector<NodeState> states = detail::make_states(topo);
  ProtocolResult result;
  result.traffic.ddm.resize(n_landmarks);

  FloodTrace wake_trace = detail::run_flood(topo, states, MessageKind::wake, -1, initiator,
                                            landmarks.front(), record_traces);
  result.traffic.wake = wake_trace.stats;
  if (record_traces) result.traces.push_back(std::move(wake_trace));

  for (std::size_t j = 0; j < n_landmarks; ++j) {
    const std::int64_t next_landmark =
        j + 1 < n_landmarks ? static_cast<std::int64_t>(landmarks[j + 1]) : -1;
    FloodTrace trace = detail::run_flood(topo, states, MessageKind::ddm,
                                         static_cast<std::int32_t>(j), landmarks[j],
                                         next_landmark, record_traces);
    result.traffic.ddm[j] = trace.stats;
    if (record_traces) result.traces.push_back(std::move(trace));
  }

  result.coords = CoordinateMatrix(topo.node_count(), n_landmarks);
  for (NodeId i = 0; i < topo.node_count(); ++i) {
    for (std::size_t j = 0; j < n_landmarks; ++j) {
      const std::int32_t d = states[i].coords[j];
      if (d < 0) throw std::logic_error("protocol left a coordinate unset on a connected topology");
      result.coords.at(i, j) = d;
    }
  }
  return result;
}

}  // namespace jumps
