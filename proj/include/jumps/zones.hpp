#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "jumps/protocol.hpp"
#include "jumps/topology.hpp"

namespace jumps {

// Nodes grouped by exact equality of their coordinate vectors. A zone is a
// class of two or more nodes; classes of one are counted as singletons and
// excluded from `zones`. Zones are ordered by smallest member id, members
// ascending.
struct ZonePartition {
  std::vector<std::vector<NodeId>> zones;
  std::size_t singleton_count = 0;
  std::size_t node_count = 0;
};

// Geometric spread of one zone, in radio-range units: zone_size is the
// maximum pairwise Euclidean distance, intra_zone_distance the mean over all
// unordered pairs.
struct ZoneMetrics {
  double zone_size = 0.0;
  double intra_zone_distance = 0.0;
  std::size_t population = 0;
};

struct ZoneSummary {
  std::size_t zone_count = 0;
  std::optional<double> mean_zone_size;
  std::optional<double> mean_intra_zone_distance;
  std::optional<double> max_zone_size;
  std::optional<double> mean_population;
};

inline ZonePartition partition_zones(const CoordinateMatrix& coords) {
  const std::size_t n = coords.node_count();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const auto ra = coords.row(a);
    const auto rb = coords.row(b);
    if (const auto cmp = std::lexicographical_compare_three_way(ra.begin(), ra.end(), rb.begin(),
                                                                rb.end());
        cmp != 0)
      return cmp < 0;
    return a < b;
  });

  ZonePartition partition;
  partition.node_count = n;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    const auto row = coords.row(order[start]);
    while (end < n && std::equal(row.begin(), row.end(), coords.row(order[end]).begin()))
      ++end;
    if (end - start >= 2)
      partition.zones.emplace_back(order.begin() + start, order.begin() + end);
    else
      ++partition.singleton_count;
    start = end;
  }
  std::sort(partition.zones.begin(), partition.zones.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return partition;
}

// Exhaustive pairwise distances within one zone, divided by the radio range.
inline ZoneMetrics zone_metrics(std::span<const NodeId> zone, const Topology& topo) {
  if (zone.size() < 2) throw std::invalid_argument("a zone has at least two members");
  const double r = topo.config().radio_range;
  double max_dist = 0.0;
  double sum_dist = 0.0;
  for (std::size_t a = 0; a < zone.size(); ++a) {
    for (std::size_t b = a + 1; b < zone.size(); ++b) {
      const double d = distance(topo.position(zone[a]), topo.position(zone[b]));
      max_dist = std::max(max_dist, d);
      sum_dist += d;
    }
  }
  const double pairs = static_cast<double>(zone.size()) * (zone.size() - 1) / 2.0;
  return {max_dist / r, sum_dist / pairs / r, zone.size()};
}

// Network-wide zone statistics. Means weight every zone equally by default;
// node_weighted weights each zone by its population instead. With no zones
// the means are reported absent.
inline ZoneSummary network_zone_summary(const ZonePartition& partition, const Topology& topo,
                                        bool node_weighted = false) {
  ZoneSummary summary;
  summary.zone_count = partition.zones.size();
  if (partition.zones.empty()) return summary;

  double size_sum = 0.0;
  double intra_sum = 0.0;
  double max_size = 0.0;
  double weight_sum = 0.0;
  std::size_t population_sum = 0;
  for (const auto& zone : partition.zones) {
    const ZoneMetrics metrics = zone_metrics(zone, topo);
    const double weight = node_weighted ? static_cast<double>(metrics.population) : 1.0;
    size_sum += weight * metrics.zone_size;
    intra_sum += weight * metrics.intra_zone_distance;
    max_size = std::max(max_size, metrics.zone_size);
    weight_sum += weight;
    population_sum += metrics.population;
  }
  summary.mean_zone_size = size_sum / weight_sum;
  summary.mean_intra_zone_distance = intra_sum / weight_sum;
  summary.max_zone_size = max_size;
  summary.mean_population =
      static_cast<double>(population_sum) / static_cast<double>(partition.zones.size());
  return summary;
}

// True when `fine` refines `coarse`: every fine zone sits inside a single
// coarse zone, and singletons only ever grow in number. Appending landmark
// axes to a fixed topology must produce refining partitions.
inline bool zones_refine(const ZonePartition& coarse, const ZonePartition& fine) {
  if (coarse.node_count != fine.node_count) return false;
  if (fine.singleton_count < coarse.singleton_count) return false;
  std::vector<std::int64_t> coarse_zone_of(coarse.node_count, -1);
  for (std::size_t z = 0; z < coarse.zones.size(); ++z)
    for (const NodeId id : coarse.zones[z]) coarse_zone_of[id] = static_cast<std::int64_t>(z);
  for (const auto& zone : fine.zones) {
    const std::int64_t parent = coarse_zone_of[zone.front()];
    if (parent < 0) return false;
    for (const NodeId id : zone)
      if (coarse_zone_of[id] != parent) return false;
  }
  return true;
}

}  // namespace jumps
