#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "jumps/energy.hpp"
#include "jumps/protocol.hpp"
#include "jumps/random.hpp"
#include "jumps/stats.hpp"
#include "jumps/topology.hpp"
#include "jumps/zones.hpp"

namespace jumps {

enum class Metric {
  zone_size,
  max_zone_size,
  intra_zone_distance,
  nodes_per_zone,
  zone_count,
};

inline constexpr std::array<Metric, 5> all_metrics{
    Metric::zone_size, Metric::max_zone_size, Metric::intra_zone_distance,
    Metric::nodes_per_zone, Metric::zone_count};

// Metrics whose per-zone (or per-trial, for max_zone_size) samples are
// pooled into distribution histograms.
inline constexpr std::array<Metric, 4> histogram_metrics{
    Metric::zone_size, Metric::max_zone_size, Metric::intra_zone_distance,
    Metric::nodes_per_zone};

constexpr std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::zone_size: return "zone_size";
    case Metric::max_zone_size: return "max_zone_size";
    case Metric::intra_zone_distance: return "intra_zone_distance";
    case Metric::nodes_per_zone: return "nodes_per_zone";
    case Metric::zone_count: return "zone_count";
  }
  return "unknown";
}

inline std::optional<Metric> metric_from_name(std::string_view name) {
  for (const Metric metric : all_metrics)
    if (metric_name(metric) == name) return metric;
  return std::nullopt;
}

// One experiment grid: every (landmark count, density) cell is simulated on
// `trials` independently seeded topologies. The desk-scale defaults keep the
// full grid in the minutes range; paper_scale_plan() switches to the large
// field and 1000 trials per cell.
struct ExperimentPlan {
  std::vector<int> landmark_counts{3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> densities{10, 20, 30, 40, 50};
  int trials = 100;
  std::uint64_t base_seed = 1;
  double field_radius = 500.0;
  double radio_range = 50.0;
  double landmark_angle_offset = 0.0;
  int max_connectivity_retries = 1000;
  double bin_width = 0.1;  // radio-range units; populations always bin by 1
  std::vector<Metric> metrics{all_metrics.begin(), all_metrics.end()};
  int jobs = 0;  // worker threads; 0 = hardware concurrency

  bool selects(Metric metric) const {
    return std::find(metrics.begin(), metrics.end(), metric) != metrics.end();
  }

  void validate() const {
    if (landmark_counts.empty()) throw std::invalid_argument("landmark_counts must be non-empty");
    if (densities.empty()) throw std::invalid_argument("densities must be non-empty");
    for (const int n : landmark_counts)
      if (n < 1) throw std::invalid_argument("landmark counts must be >= 1");
    for (const int d : densities)
      if (d < 1) throw std::invalid_argument("densities must be >= 1");
    if (trials < 2) throw std::invalid_argument("trials must be >= 2");
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin_width must be > 0");
    if (metrics.empty()) throw std::invalid_argument("metric selection must be non-empty");
    if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
    TopologyConfig probe;
    probe.field_radius = field_radius;
    probe.radio_range = radio_range;
    probe.landmark_angle_offset = landmark_angle_offset;
    probe.max_connectivity_retries = max_connectivity_retries;
    probe.validate();
  }
};

inline ExperimentPlan desk_scale_plan() { return {}; }

inline ExperimentPlan paper_scale_plan() {
  ExperimentPlan plan;
  plan.field_radius = 1000.0;
  plan.trials = 1000;
  return plan;
}

// Per-trial topology seed: a SplitMix64 chain over (base_seed, landmark
// count, density, trial index). Cells are independent and any single cell
// can be reproduced in isolation.
constexpr std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t landmark_count,
                                 std::uint64_t density, std::uint64_t trial_index) {
  std::uint64_t h = splitmix64(base_seed);
  h = hash_mix(h, landmark_count);
  h = hash_mix(h, density);
  h = hash_mix(h, trial_index);
  return h;
}

// Provenance hash over every result-affecting plan field (jobs excluded:
// the worker count never changes results).
inline std::uint64_t plan_hash(const ExperimentPlan& plan) {
  std::uint64_t h = splitmix64(0x6a756d7073ULL);
  for (const int n : plan.landmark_counts) h = hash_mix(h, static_cast<std::uint64_t>(n));
  for (const int d : plan.densities) h = hash_mix(h, static_cast<std::uint64_t>(d));
  h = hash_mix(h, static_cast<std::uint64_t>(plan.trials));
  h = hash_mix(h, plan.base_seed);
  h = hash_mix(h, std::bit_cast<std::uint64_t>(plan.field_radius));
  h = hash_mix(h, std::bit_cast<std::uint64_t>(plan.radio_range));
  h = hash_mix(h, std::bit_cast<std::uint64_t>(plan.landmark_angle_offset));
  h = hash_mix(h, static_cast<std::uint64_t>(plan.max_connectivity_retries));
  h = hash_mix(h, std::bit_cast<std::uint64_t>(plan.bin_width));
  for (const Metric metric : plan.metrics) h = hash_mix(h, static_cast<std::uint64_t>(metric));
  return h;
}

struct TrialOutcome {
  std::uint64_t seed = 0;
  int trial_index = -1;
  bool replacement = false;
  bool failed = false;
  bool connectivity_exhausted = false;
  std::string error;
  int redraws = 0;

  std::size_t node_count = 0;
  std::size_t zone_count = 0;
  std::size_t singleton_count = 0;
  std::optional<double> mean_zone_size;
  std::optional<double> mean_intra_zone_distance;
  std::optional<double> max_zone_size;
  std::optional<double> mean_population;

  // Per-zone samples; run_cell pools them into histograms and then drops
  // them to keep memory flat over large plans.
  std::vector<double> zone_sizes;
  std::vector<double> intra_zone_distances;
  std::vector<double> populations;

  std::optional<double> metric_value(Metric metric) const {
    switch (metric) {
      case Metric::zone_size: return mean_zone_size;
      case Metric::max_zone_size: return max_zone_size;
      case Metric::intra_zone_distance: return mean_intra_zone_distance;
      case Metric::nodes_per_zone: return mean_population;
      case Metric::zone_count: return static_cast<double>(zone_count);
    }
    return std::nullopt;
  }
};

inline TopologyConfig cell_config(const ExperimentPlan& plan, int landmark_count, int density,
                                  std::uint64_t seed) {
  TopologyConfig config;
  config.field_radius = plan.field_radius;
  config.radio_range = plan.radio_range;
  config.neighbor_density = density;
  config.landmark_count = landmark_count;
  config.landmark_angle_offset = plan.landmark_angle_offset;
  config.seed = seed;
  config.max_connectivity_retries = plan.max_connectivity_retries;
  return config;
}

// One seeded trial: topology -> protocol -> zone partition -> metrics.
// Failures (connectivity exhaustion) are reported in the outcome, never
// thrown.
inline TrialOutcome run_trial(const ExperimentPlan& plan, int landmark_count, int density,
                              std::uint64_t seed) {
  TrialOutcome outcome;
  outcome.seed = seed;
  try {
    const Topology topo = Topology::generate(cell_config(plan, landmark_count, density, seed));
    outcome.redraws = topo.connectivity_redraws();
    outcome.node_count = topo.node_count();

    const ProtocolResult protocol = run_full_protocol(topo);
    const ZonePartition partition = partition_zones(protocol.coords);
    outcome.zone_count = partition.zones.size();
    outcome.singleton_count = partition.singleton_count;

    if (!partition.zones.empty()) {
      double size_sum = 0.0, intra_sum = 0.0, max_size = 0.0, population_sum = 0.0;
      outcome.zone_sizes.reserve(partition.zones.size());
      outcome.intra_zone_distances.reserve(partition.zones.size());
      outcome.populations.reserve(partition.zones.size());
      for (const auto& zone : partition.zones) {
        const ZoneMetrics metrics = zone_metrics(zone, topo);
        outcome.zone_sizes.push_back(metrics.zone_size);
        outcome.intra_zone_distances.push_back(metrics.intra_zone_distance);
        outcome.populations.push_back(static_cast<double>(metrics.population));
        size_sum += metrics.zone_size;
        intra_sum += metrics.intra_zone_distance;
        max_size = std::max(max_size, metrics.zone_size);
        population_sum += static_cast<double>(metrics.population);
      }
      const double zones = static_cast<double>(partition.zones.size());
      outcome.mean_zone_size = size_sum / zones;
      outcome.mean_intra_zone_distance = intra_sum / zones;
      outcome.max_zone_size = max_size;
      outcome.mean_population = population_sum / zones;
    }
  } catch (const ConnectivityExhausted& e) {
    outcome.failed = true;
    outcome.connectivity_exhausted = true;
    outcome.error = e.what();
    outcome.redraws = e.attempts();
  } catch (const std::exception& e) {
    outcome.failed = true;
    outcome.error = e.what();
  }
  return outcome;
}

// Runs `body(index)` for every index on up to `jobs` worker threads. The
// body must not throw; results must go into per-index slots.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

struct MetricSummary {
  std::size_t samples = 0;
  double mean = 0.0;
  double ci999 = 0.0;
};

struct CellResult {
  int landmark_count = 0;
  int density = 0;
  int trials_requested = 0;
  int trials_completed = 0;
  int exhausted_trials = 0;  // attempts that ran out of connectivity redraws
  int replaced_trials = 0;   // planned slots refilled from replacement seeds
  long long total_redraws = 0;
  bool unreliable = false;

  std::vector<TrialOutcome> trials;  // completed trials in slot order, samples dropped
  std::map<Metric, MetricSummary> summary;
  std::map<Metric, std::optional<double>> benefit_vs_3_pct;  // filled by run_plan
  std::map<Metric, Histogram> histograms;
  std::vector<std::string> errors;
};

// Runs every trial of one grid cell. Trials that exhaust their connectivity
// redraws are replaced by the next seeds in sequence (trial indices past the
// planned range) so the cell still reports the planned trial count; a cell
// with more than 10% exhausted attempts is marked unreliable. Unlike
// run_plan, a single trial is allowed here; metrics then come back without
// confidence intervals.
inline CellResult run_cell(const ExperimentPlan& plan, int landmark_count, int density) {
  if (plan.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(plan.bin_width > 0.0)) throw std::invalid_argument("bin_width must be > 0");
  if (plan.metrics.empty()) throw std::invalid_argument("metric selection must be non-empty");
  cell_config(plan, landmark_count, density, 0).validate();
  CellResult cell;
  cell.landmark_count = landmark_count;
  cell.density = density;
  cell.trials_requested = plan.trials;

  const std::size_t slots = static_cast<std::size_t>(plan.trials);
  std::vector<TrialOutcome> slot_results(slots);

  const auto run_into_slot = [&](std::size_t slot, int trial_index, bool replacement) {
    const std::uint64_t seed =
        mix_seed(plan.base_seed, static_cast<std::uint64_t>(landmark_count),
                 static_cast<std::uint64_t>(density), static_cast<std::uint64_t>(trial_index));
    TrialOutcome outcome = run_trial(plan, landmark_count, density, seed);
    outcome.trial_index = trial_index;
    outcome.replacement = replacement;
    slot_results[slot] = std::move(outcome);
  };

  parallel_for(slots, plan.jobs, [&](std::size_t slot) {
    run_into_slot(slot, static_cast<int>(slot), false);
  });

  // Replacement passes, deterministic by index assignment; a budget of one
  // extra seed range keeps a hopeless cell from looping forever.
  const auto record_failure = [&](const TrialOutcome& outcome) {
    cell.total_redraws += outcome.redraws;
    if (outcome.connectivity_exhausted) ++cell.exhausted_trials;
    if (!outcome.error.empty() && cell.errors.size() < 8) cell.errors.push_back(outcome.error);
  };
  int next_trial_index = plan.trials;
  const int replacement_budget = 2 * plan.trials;
  while (next_trial_index < replacement_budget) {
    std::vector<std::pair<std::size_t, int>> assignments;
    for (std::size_t slot = 0; slot < slots && next_trial_index < replacement_budget; ++slot) {
      if (!slot_results[slot].failed) continue;
      record_failure(slot_results[slot]);
      assignments.emplace_back(slot, next_trial_index++);
    }
    if (assignments.empty()) break;
    parallel_for(assignments.size(), plan.jobs, [&](std::size_t i) {
      run_into_slot(assignments[i].first, assignments[i].second, true);
    });
  }

  // Pool samples, then keep only scalar per-trial records.
  Histogram zone_size_hist(plan.bin_width);
  Histogram intra_hist(plan.bin_width);
  Histogram max_zone_hist(plan.bin_width);
  Histogram population_hist(1.0);
  std::map<Metric, std::vector<double>> metric_samples;

  for (TrialOutcome& outcome : slot_results) {
    if (outcome.failed) {
      record_failure(outcome);
      continue;
    }
    cell.total_redraws += outcome.redraws;
    if (outcome.replacement) ++cell.replaced_trials;
    zone_size_hist.add(std::span<const double>(outcome.zone_sizes));
    intra_hist.add(std::span<const double>(outcome.intra_zone_distances));
    population_hist.add(std::span<const double>(outcome.populations));
    if (outcome.max_zone_size) max_zone_hist.add(*outcome.max_zone_size);
    for (const Metric metric : plan.metrics)
      if (const auto value = outcome.metric_value(metric)) metric_samples[metric].push_back(*value);
    outcome.zone_sizes.clear();
    outcome.zone_sizes.shrink_to_fit();
    outcome.intra_zone_distances.clear();
    outcome.intra_zone_distances.shrink_to_fit();
    outcome.populations.clear();
    outcome.populations.shrink_to_fit();
    cell.trials.push_back(std::move(outcome));
  }
  cell.trials_completed = static_cast<int>(cell.trials.size());
  cell.unreliable = cell.exhausted_trials * 10 > cell.trials_requested;

  for (const auto& [metric, samples] : metric_samples) {
    if (samples.size() < 2) continue;
    const Aggregate agg = aggregate(samples);
    cell.summary[metric] = MetricSummary{agg.count, agg.mean, agg.ci999_halfwidth};
  }
  if (plan.selects(Metric::zone_size))
    cell.histograms.emplace(Metric::zone_size, std::move(zone_size_hist));
  if (plan.selects(Metric::max_zone_size))
    cell.histograms.emplace(Metric::max_zone_size, std::move(max_zone_hist));
  if (plan.selects(Metric::intra_zone_distance))
    cell.histograms.emplace(Metric::intra_zone_distance, std::move(intra_hist));
  if (plan.selects(Metric::nodes_per_zone))
    cell.histograms.emplace(Metric::nodes_per_zone, std::move(population_hist));
  return cell;
}

struct ScenarioResult {
  ExperimentPlan plan;
  std::uint64_t hash = 0;
  std::vector<CellResult> cells;
  std::vector<EnergyRow> energy;

  const CellResult* cell(int landmark_count, int density) const {
    for (const CellResult& c : cells)
      if (c.landmark_count == landmark_count && c.density == density) return &c;
    return nullptr;
  }

  bool any_unreliable() const {
    return std::any_of(cells.begin(), cells.end(),
                       [](const CellResult& c) { return c.unreliable; });
  }
};

using ProgressFn = std::function<void(const CellResult&, std::size_t, std::size_t)>;

// Executes the whole grid, attaches relative benefits against the
// same-density 3-landmark cell, and overlays the energy-model ratio table
// (reference density = the smallest density in the plan). Deterministic for
// a given plan and base seed.
inline ScenarioResult run_plan(const ExperimentPlan& plan, const ProgressFn& progress = {}) {
  plan.validate();
  ScenarioResult result;
  result.plan = plan;
  result.hash = plan_hash(plan);

  const std::size_t total_cells = plan.landmark_counts.size() * plan.densities.size();
  for (const int n : plan.landmark_counts) {
    for (const int d : plan.densities) {
      CellResult cell = run_cell(plan, n, d);
      if (progress) progress(cell, result.cells.size() + 1, total_cells);
      result.cells.push_back(std::move(cell));
    }
  }

  for (CellResult& cell : result.cells) {
    const CellResult* baseline = result.cell(3, cell.density);
    for (const Metric metric : plan.metrics) {
      if (cell.landmark_count == 3) {
        cell.benefit_vs_3_pct[metric] = 0.0;
        continue;
      }
      std::optional<double> benefit;
      if (baseline != nullptr) {
        const auto own = cell.summary.find(metric);
        const auto base = baseline->summary.find(metric);
        if (own != cell.summary.end() && base != baseline->summary.end())
          benefit = relative_benefit_pct(own->second.mean, base->second.mean);
      }
      cell.benefit_vs_3_pct[metric] = benefit;
    }
  }

  EnergyModelParams params;
  params.reference_density = *std::min_element(plan.densities.begin(), plan.densities.end());
  std::vector<double> densities(plan.densities.begin(), plan.densities.end());
  result.energy = relative_energy_curve(plan.landmark_counts, densities, params);
  return result;
}

}  // namespace jumps
