#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jumps/energy.hpp"
#include "jumps/harness.hpp"
#include "jumps/protocol.hpp"
#include "jumps/topology.hpp"
#include "jumps/zones.hpp"

namespace jumps {

using json = nlohmann::ordered_json;

inline constexpr int k_schema_version = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

inline std::string to_hex(std::uint64_t value) {
  char buffer[20];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

inline void check_schema_version(const json& document, std::string_view what) {
  if (document.contains("schema_version") && document.at("schema_version").get<int>() != k_schema_version)
    throw std::invalid_argument(std::string(what) + ": unsupported schema_version");
}

// --- configuration documents ------------------------------------------------

inline json to_json(const TopologyConfig& config) {
  return json{{"schema_version", k_schema_version},
              {"field_radius", config.field_radius},
              {"radio_range", config.radio_range},
              {"neighbor_density", config.neighbor_density},
              {"landmark_count", config.landmark_count},
              {"landmark_angle_offset", config.landmark_angle_offset},
              {"seed", config.seed},
              {"max_connectivity_retries", config.max_connectivity_retries}};
}

inline TopologyConfig topology_config_from_json(const json& document) {
  check_schema_version(document, "topology config");
  TopologyConfig config;
  config.field_radius = document.value("field_radius", config.field_radius);
  config.radio_range = document.value("radio_range", config.radio_range);
  config.neighbor_density = document.value("neighbor_density", config.neighbor_density);
  config.landmark_count = document.value("landmark_count", config.landmark_count);
  config.landmark_angle_offset =
      document.value("landmark_angle_offset", config.landmark_angle_offset);
  config.seed = document.value("seed", config.seed);
  config.max_connectivity_retries =
      document.value("max_connectivity_retries", config.max_connectivity_retries);
  config.validate();
  return config;
}

inline json to_json(const ExperimentPlan& plan) {
  json metric_names = json::array();
  for (const Metric metric : plan.metrics) metric_names.push_back(metric_name(metric));
  return json{{"schema_version", k_schema_version},
              {"kind", "plan"},
              {"landmark_counts", plan.landmark_counts},
              {"densities", plan.densities},
              {"trials", plan.trials},
              {"base_seed", plan.base_seed},
              {"field_radius", plan.field_radius},
              {"radio_range", plan.radio_range},
              {"landmark_angle_offset", plan.landmark_angle_offset},
              {"max_connectivity_retries", plan.max_connectivity_retries},
              {"bin_width", plan.bin_width},
              {"metrics", std::move(metric_names)}};
}

inline ExperimentPlan plan_from_json(const json& document) {
  check_schema_version(document, "plan");
  ExperimentPlan plan;
  if (document.contains("landmark_counts"))
    plan.landmark_counts = document.at("landmark_counts").get<std::vector<int>>();
  if (document.contains("densities"))
    plan.densities = document.at("densities").get<std::vector<int>>();
  plan.trials = document.value("trials", plan.trials);
  plan.base_seed = document.value("base_seed", plan.base_seed);
  plan.field_radius = document.value("field_radius", plan.field_radius);
  plan.radio_range = document.value("radio_range", plan.radio_range);
  plan.landmark_angle_offset =
      document.value("landmark_angle_offset", plan.landmark_angle_offset);
  plan.max_connectivity_retries =
      document.value("max_connectivity_retries", plan.max_connectivity_retries);
  plan.bin_width = document.value("bin_width", plan.bin_width);
  if (document.contains("metrics")) {
    plan.metrics.clear();
    for (const json& name : document.at("metrics")) {
      const auto metric = metric_from_name(name.get<std::string>());
      if (!metric)
        throw std::invalid_argument("unknown metric \"" + name.get<std::string>() + "\"");
      plan.metrics.push_back(*metric);
    }
  }
  plan.validate();
  return plan;
}

inline json to_json(const EnergyModelParams& params) {
  return json{{"schema_version", k_schema_version},
              {"rx_current_ma", params.rx_current_ma},
              {"itx_offset", params.itx_offset},
              {"itx_scale", params.itx_scale},
              {"voltage", params.voltage},
              {"path_loss_exponent", params.path_loss_exponent},
              {"reference_density", params.reference_density}};
}

inline EnergyModelParams energy_params_from_json(const json& document) {
  check_schema_version(document, "energy params");
  EnergyModelParams params;
  params.rx_current_ma = document.value("rx_current_ma", params.rx_current_ma);
  params.itx_offset = document.value("itx_offset", params.itx_offset);
  params.itx_scale = document.value("itx_scale", params.itx_scale);
  params.voltage = document.value("voltage", params.voltage);
  params.path_loss_exponent = document.value("path_loss_exponent", params.path_loss_exponent);
  params.reference_density = document.value("reference_density", params.reference_density);
  params.validate();
  return params;
}

// --- topology documents -----------------------------------------------------

// Positions are canonical; adjacency is rebuilt on load.
inline json topology_to_json(const Topology& topo) {
  json positions = json::array();
  for (const Vec2& p : topo.positions()) positions.push_back(json::array({p.x, p.y}));
  return json{{"schema_version", k_schema_version},
              {"kind", "topology"},
              {"config", to_json(topo.config())},
              {"landmark_ids", topo.landmark_ids()},
              {"connectivity_redraws", topo.connectivity_redraws()},
              {"positions", std::move(positions)}};
}

inline Topology topology_from_json(const json& document) {
  check_schema_version(document, "topology");
  if (document.contains("kind") && document.at("kind").get<std::string>() != "topology")
    throw std::invalid_argument("document is not a topology");
  const TopologyConfig config = topology_config_from_json(document.at("config"));
  std::vector<Vec2> positions;
  for (const json& p : document.at("positions"))
    positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  const auto landmark_ids = document.at("landmark_ids").get<std::vector<NodeId>>();
  const int redraws = document.value("connectivity_redraws", 0);
  return Topology::from_positions(config, std::move(positions), landmark_ids, redraws);
}

// --- files ------------------------------------------------------------------

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
}

inline void save_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

inline void save_json_file(const std::filesystem::path& path, const json& document) {
  save_text_file(path, document.dump(2) + "\n");
}

// --- CSV --------------------------------------------------------------------

inline void write_coordinates_csv(std::ostream& os, const Topology& topo,
                                  const CoordinateMatrix& coords) {
  os << "node_id,x,y";
  for (std::size_t j = 0; j < coords.landmark_count(); ++j) os << ",d_" << j + 1;
  os << "\n";
  for (NodeId i = 0; i < topo.node_count(); ++i) {
    os << i << ',' << format_double(topo.position(i).x) << ','
       << format_double(topo.position(i).y);
    for (const std::int32_t d : coords.row(i)) os << ',' << d;
    os << "\n";
  }
}

inline void write_zone_report_csv(std::ostream& os, const Topology& topo,
                                  const ZonePartition& partition) {
  os << "zone_id,population,zone_size_rr,intra_zone_rr,centroid_x,centroid_y\n";
  for (std::size_t z = 0; z < partition.zones.size(); ++z) {
    const auto& zone = partition.zones[z];
    const ZoneMetrics metrics = zone_metrics(zone, topo);
    double cx = 0.0, cy = 0.0;
    for (const NodeId id : zone) {
      cx += topo.position(id).x;
      cy += topo.position(id).y;
    }
    cx /= static_cast<double>(zone.size());
    cy /= static_cast<double>(zone.size());
    os << z << ',' << metrics.population << ',' << format_double(metrics.zone_size) << ','
       << format_double(metrics.intra_zone_distance) << ',' << format_double(cx) << ','
       << format_double(cy) << "\n";
  }
}

inline std::string provenance_comment(const ScenarioResult& result) {
  return "# jumps schema_version=" + std::to_string(k_schema_version) +
         " plan_hash=" + to_hex(result.hash) + " base_seed=" + std::to_string(result.plan.base_seed);
}

inline void write_results_csv(std::ostream& os, const ScenarioResult& result) {
  os << provenance_comment(result) << "\n";
  os << "N,d_neig,trials,metric,mean,ci999,benefit_vs_3_pct\n";
  for (const CellResult& cell : result.cells) {
    for (const Metric metric : all_metrics) {
      const auto summary = cell.summary.find(metric);
      if (summary == cell.summary.end()) continue;
      os << cell.landmark_count << ',' << cell.density << ',' << cell.trials_completed << ','
         << metric_name(metric) << ',' << format_double(summary->second.mean) << ','
         << format_double(summary->second.ci999);
      os << ',';
      const auto benefit = cell.benefit_vs_3_pct.find(metric);
      if (benefit != cell.benefit_vs_3_pct.end() && benefit->second)
        os << format_double(*benefit->second);
      os << "\n";
    }
  }
}

inline void write_histogram_csv(std::ostream& os, const ScenarioResult& result, Metric metric) {
  os << provenance_comment(result) << "\n";
  os << "N,d_neig,bin_left,count\n";
  for (const CellResult& cell : result.cells) {
    const auto hist = cell.histograms.find(metric);
    if (hist == cell.histograms.end()) continue;
    for (const auto& [k, count] : hist->second.bins()) {
      os << cell.landmark_count << ',' << cell.density << ','
         << format_double(hist->second.bin_left(k)) << ',' << count << "\n";
    }
  }
}

inline void write_energy_csv(std::ostream& os, std::span<const EnergyRow> rows,
                             const std::string& provenance) {
  if (!provenance.empty()) os << provenance << "\n";
  os << "N,d_neig,d_ratio,itx_mA,per_node_energy,ratio_to_reference\n";
  for (const EnergyRow& row : rows) {
    os << row.landmark_count << ',' << format_double(row.neighbor_density) << ','
       << format_double(row.density_ratio) << ',' << format_double(row.itx_ma) << ','
       << format_double(row.per_node_energy) << ',' << format_double(row.ratio_to_reference)
       << "\n";
  }
}

// Per-round event log of one or more floods, for debugging.
inline void write_flood_trace_csv(std::ostream& os, std::span<const FloodTrace> traces) {
  os << "round,flood_id,emitter_ids\n";
  for (const FloodTrace& trace : traces) {
    for (std::size_t round = 0; round < trace.round_emitters.size(); ++round) {
      os << round << ',' << trace.flood_id << ',';
      const auto& emitters = trace.round_emitters[round];
      for (std::size_t i = 0; i < emitters.size(); ++i) {
        if (i > 0) os << ' ';
        os << emitters[i];
      }
      os << "\n";
    }
  }
}

}  // namespace jumps
