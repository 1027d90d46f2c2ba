#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jumps/geometry.hpp"
#include "jumps/random.hpp"

namespace jumps {

using NodeId = std::uint32_t;

// Thrown when no connected topology came out of the configured number of
// position draws. Signals that the requested density is too low for full
// connectivity.
class ConnectivityExhausted : public std::runtime_error {
 public:
  explicit ConnectivityExhausted(int attempts)
      : std::runtime_error("no connected topology after " + std::to_string(attempts) +
                           " position draws"),
        attempts_(attempts) {}

  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// Node population that yields an average of `neighbor_density` neighbors per
// node on a disc of radius R with radio range r: M = round((R/r)^2 * (d + 1)).
inline std::size_t population_for_density(double neighbor_density, double field_radius,
                                          double radio_range) {
  if (!(neighbor_density > 0.0)) throw std::domain_error("neighbor_density must be > 0");
  if (!(radio_range > 0.0)) throw std::domain_error("radio_range must be > 0");
  if (!(field_radius >= radio_range)) throw std::domain_error("field_radius must be >= radio_range");
  const double scale = field_radius / radio_range;
  return static_cast<std::size_t>(std::llround(scale * scale * (neighbor_density + 1.0)));
}

// Uniform-area positions strictly inside the disc of radius `field_radius`:
// radius R*sqrt(u) keeps the density constant over the disc, u < 1 keeps
// nodes strictly inside.
inline std::vector<Vec2> sample_disc_positions(std::mt19937_64& rng, std::size_t count,
                                               double field_radius) {
  std::vector<Vec2> positions;
  positions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double radius = field_radius * std::sqrt(unit_real(rng));
    const double angle = 2.0 * std::numbers::pi * unit_real(rng);
    positions.push_back({radius * std::cos(angle), radius * std::sin(angle)});
  }
  return positions;
}

// Landmark positions on the circle of radius `field_radius`, at angles
// angle_offset + 2*pi*k/count for k = 0..count-1.
inline std::vector<Vec2> place_landmarks(int count, double field_radius,
                                         double angle_offset = 0.0) {
  if (count < 1) throw std::domain_error("landmark count must be >= 1");
  if (!(field_radius > 0.0)) throw std::domain_error("field_radius must be > 0");
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double angle = angle_offset + 2.0 * std::numbers::pi * k / count;
    points.push_back({field_radius * std::cos(angle), field_radius * std::sin(angle)});
  }
  return points;
}

struct TopologyConfig {
  double field_radius = 1000.0;     // R, meters
  double radio_range = 50.0;        // r, meters
  double neighbor_density = 10.0;   // d_neig, average neighbors per node
  int landmark_count = 3;           // N
  double landmark_angle_offset = 0.0;
  std::uint64_t seed = 1;
  int max_connectivity_retries = 1000;

  std::size_t population() const {
    return population_for_density(neighbor_density, field_radius, radio_range);
  }

  void validate() const {
    if (!(field_radius > 0.0)) throw std::invalid_argument("field_radius must be > 0");
    if (!(radio_range > 0.0)) throw std::invalid_argument("radio_range must be > 0");
    if (radio_range > field_radius)
      throw std::invalid_argument("radio_range must not exceed field_radius");
    if (!(neighbor_density > 0.0)) throw std::invalid_argument("neighbor_density must be > 0");
    if (landmark_count < 1) throw std::invalid_argument("landmark_count must be >= 1");
    if (!std::isfinite(landmark_angle_offset))
      throw std::invalid_argument("landmark_angle_offset must be finite");
    if (max_connectivity_retries < 1)
      throw std::invalid_argument("max_connectivity_retries must be >= 1");
  }
};

// A random geometric graph on a disc: M uniformly drawn nodes followed by N
// landmark nodes on the border, with an edge between every pair at Euclidean
// distance <= radio_range. Immutable after construction and safe to share
// across threads.
class Topology {
 public:
  // Draws node positions until the graph is connected, advancing the seeded
  // stream on every redraw. Throws ConnectivityExhausted when the retry
  // budget runs out.
  static Topology generate(const TopologyConfig& config) {
    config.validate();
    const std::size_t m = config.population();
    const std::vector<Vec2> landmark_positions =
        place_landmarks(config.landmark_count, config.field_radius, config.landmark_angle_offset);

    Topology topo;
    topo.config_ = config;
    topo.landmark_ids_.resize(landmark_positions.size());
    for (std::size_t k = 0; k < landmark_positions.size(); ++k)
      topo.landmark_ids_[k] = static_cast<NodeId>(m + k);

    std::mt19937_64 rng(config.seed);
    for (int attempt = 0; attempt < config.max_connectivity_retries; ++attempt) {
      topo.positions_ = sample_disc_positions(rng, m, config.field_radius);
      topo.positions_.insert(topo.positions_.end(), landmark_positions.begin(),
                             landmark_positions.end());
      topo.build_adjacency();
      if (topo.is_connected()) {
        topo.redraws_ = attempt;
        return topo;
      }
    }
    throw ConnectivityExhausted(config.max_connectivity_retries);
  }

  // Builds a topology from explicit positions (fixtures, loaded documents).
  // Positions are canonical: adjacency is rebuilt from them. Landmarks must
  // be the trailing nodes, exactly on the field border; the graph must be
  // connected.
  static Topology from_positions(const TopologyConfig& config, std::vector<Vec2> positions,
                                 const std::vector<NodeId>& landmark_ids, int redraws = 0) {
    config.validate();
    if (positions.empty()) throw std::invalid_argument("topology needs at least one node");
    if (landmark_ids.size() != static_cast<std::size_t>(config.landmark_count))
      throw std::invalid_argument("landmark_ids must have landmark_count entries");
    if (landmark_ids.size() > positions.size())
      throw std::invalid_argument("more landmarks than nodes");
    const std::size_t m = positions.size() - landmark_ids.size();
    for (std::size_t k = 0; k < landmark_ids.size(); ++k)
      if (landmark_ids[k] != m + k)
        throw std::invalid_argument("landmarks must be the trailing nodes in id order");
    const double r_field = config.field_radius;
    for (std::size_t i = 0; i < m; ++i)
      if (!(norm(positions[i]) < r_field))
        throw std::invalid_argument("node " + std::to_string(i) + " is not inside the field disc");
    for (const NodeId id : landmark_ids)
      if (std::abs(norm(positions[id]) - r_field) > 1e-9 * std::max(1.0, r_field))
        throw std::invalid_argument("landmark " + std::to_string(id) +
                                    " is not on the field border");

    Topology topo;
    topo.config_ = config;
    topo.positions_ = std::move(positions);
    topo.landmark_ids_ = landmark_ids;
    topo.redraws_ = redraws;
    topo.build_adjacency();
    if (!topo.is_connected()) throw std::invalid_argument("topology is not connected");
    return topo;
  }

  const TopologyConfig& config() const { return config_; }
  std::size_t node_count() const { return positions_.size(); }
  std::size_t random_node_count() const { return positions_.size() - landmark_ids_.size(); }
  const std::vector<Vec2>& positions() const { return positions_; }
  const Vec2& position(NodeId id) const { return positions_[id]; }
  const std::vector<NodeId>& landmark_ids() const { return landmark_ids_; }
  NodeId landmark(std::size_t index) const { return landmark_ids_.at(index); }

  std::span<const NodeId> neighbors(NodeId id) const {
    return {neighbors_.data() + offsets_[id], offsets_[id + 1] - offsets_[id]};
  }
  std::size_t degree(NodeId id) const { return offsets_[id + 1] - offsets_[id]; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  double mean_degree() const {
    return positions_.empty() ? 0.0
                              : static_cast<double>(neighbors_.size()) /
                                    static_cast<double>(positions_.size());
  }

  // Position draws rejected for being disconnected before this one.
  int connectivity_redraws() const { return redraws_; }

  // Exact minimum hop counts from `source` to every node. The ground-truth
  // distance oracle the protocol must match.
  std::vector<std::int32_t> bfs_hops(NodeId source) const {
    if (source >= node_count()) throw std::out_of_range("bfs source out of range");
    std::vector<std::int32_t> hops(node_count(), -1);
    std::vector<NodeId> queue;
    queue.reserve(node_count());
    hops[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (const NodeId v : neighbors(u)) {
        if (hops[v] < 0) {
          hops[v] = hops[u] + 1;
          queue.push_back(v);
        }
      }
    }
    if (queue.size() != node_count())
      throw std::logic_error("bfs did not reach every node of a supposedly connected topology");
    return hops;
  }

 private:
  Topology() = default;

  void build_adjacency() {
    const std::size_t n = positions_.size();
    const double r = config_.radio_range;
    const double r2 = r * r;
    // Grid buckets of cell size r: candidate neighbors live in the 3x3 cell
    // neighborhood around a node.
    const double origin = -(config_.field_radius + 2.0 * r);
    const auto cell_x = [&](const Vec2& p) { return static_cast<int>((p.x - origin) / r); };
    const auto cell_y = [&](const Vec2& p) { return static_cast<int>((p.y - origin) / r); };
    const auto key_of = [](int cx, int cy) {
      return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
             static_cast<std::uint32_t>(cy);
    };
    std::unordered_map<std::uint64_t, std::vector<NodeId>> buckets;
    buckets.reserve(n);
    for (NodeId i = 0; i < n; ++i)
      buckets[key_of(cell_x(positions_[i]), cell_y(positions_[i]))].push_back(i);

    std::vector<std::vector<NodeId>> adjacency(n);
    for (NodeId i = 0; i < n; ++i) {
      const int cx = cell_x(positions_[i]);
      const int cy = cell_y(positions_[i]);
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          const auto it = buckets.find(key_of(cx + dx, cy + dy));
          if (it == buckets.end()) continue;
          for (const NodeId j : it->second) {
            if (j <= i) continue;
            if (squared_distance(positions_[i], positions_[j]) <= r2) {
              adjacency[i].push_back(j);
              adjacency[j].push_back(static_cast<NodeId>(i));
            }
          }
        }
      }
    }

    offsets_.assign(n + 1, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      offsets_[i] = total;
      total += adjacency[i].size();
    }
    offsets_[n] = total;
    neighbors_.clear();
    neighbors_.reserve(total);
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(adjacency[i].begin(), adjacency[i].end());
      neighbors_.insert(neighbors_.end(), adjacency[i].begin(), adjacency[i].end());
    }
  }

  bool is_connected() const {
    const std::size_t n = positions_.size();
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> queue;
    queue.reserve(n);
    seen[0] = 1;
    queue.push_back(0);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const NodeId v : neighbors(queue[head])) {
        if (!seen[v]) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
    return queue.size() == n;
  }

  TopologyConfig config_;
  std::vector<Vec2> positions_;     // M random nodes, then N landmarks
  std::vector<NodeId> landmark_ids_;
  std::vector<std::size_t> offsets_;  // CSR adjacency, neighbor lists sorted
  std::vector<NodeId> neighbors_;
  int redraws_ = 0;
};

}  // namespace jumps
