#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jumps/harness.hpp"
#include "jumps/io.hpp"
#include "jumps/jumps.hpp"

namespace jumps::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_connectivity = 3;
inline constexpr int exit_io = 4;
inline constexpr int exit_unreliable = 5;

namespace detail {

// Explicit --out must be empty or forced; the default directory is
// timestamped so repeated runs never clobber each other.
inline std::filesystem::path resolve_out_dir(const std::string& out, bool force) {
  namespace fs = std::filesystem;
  fs::path path;
  if (!out.empty()) {
    path = out;
    if (fs::exists(path)) {
      if (!fs::is_directory(path))
        throw IoError(path.string() + " exists and is not a directory");
      if (!force && !fs::is_empty(path))
        throw IoError("output directory " + path.string() + " is not empty (use --force)");
    }
  } else {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    const std::string base = std::string("jumps-out-") + stamp;
    path = base;
    for (int k = 1; fs::exists(path); ++k) path = base + "-" + std::to_string(k);
  }
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create " + path.string() + ": " + ec.message());
  return path;
}

inline std::string opt_str(const std::optional<double>& value) {
  return value ? format_double(*value) : "n/a";
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"jumps: landmark hop-count virtual coordinate simulator"};
  app.require_subcommand(1);
  int exit_code = exit_ok;

  // generate
  struct {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;
  } gen;
  CLI::App* generate = app.add_subcommand("generate", "generate a random disc topology");
  generate->add_option("--config", gen.config_path, "topology config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* gen_seed =
      generate->add_option("--seed", gen.seed, "override the config seed")->envname("JUMPS_SEED");
  generate->add_option("--out", gen.out, "output directory (default: timestamped)");
  generate->add_flag("--force", gen.force, "write into a non-empty output directory");
  generate->callback([&] {
    TopologyConfig config = topology_config_from_json(load_json_file(gen.config_path));
    if (gen_seed->count() > 0) config.seed = gen.seed;
    const Topology topo = Topology::generate(config);
    const auto out_dir = detail::resolve_out_dir(gen.out, gen.force);
    save_json_file(out_dir / "topology.json", topology_to_json(topo));
    std::printf("nodes=%zu edges=%zu mean_degree=%s redraws=%d\n", topo.node_count(),
                topo.edge_count(), format_double(topo.mean_degree()).c_str(),
                topo.connectivity_redraws());
    std::printf("wrote %s\n", (out_dir / "topology.json").string().c_str());
  });

  // run
  struct {
    std::string topology_path;
    std::string config_path;
    std::uint64_t seed = 0;
    std::uint64_t initiator = 0;
    std::string out;
    bool force = false;
    bool trace = false;
  } runo;
  CLI::App* run_cmd = app.add_subcommand("run", "run the coordinate protocol and zone analysis");
  CLI::Option* run_topo =
      run_cmd->add_option("--topology", runo.topology_path, "topology JSON to load")
          ->check(CLI::ExistingFile);
  CLI::Option* run_config =
      run_cmd->add_option("--config", runo.config_path, "topology config JSON to generate from")
          ->check(CLI::ExistingFile);
  run_topo->excludes(run_config);
  CLI::Option* run_seed =
      run_cmd->add_option("--seed", runo.seed, "override the config seed")->envname("JUMPS_SEED");
  run_cmd->add_option("--initiator", runo.initiator, "wake-up initiator node id (default 0)");
  run_cmd->add_option("--out", runo.out, "output directory (default: timestamped)");
  run_cmd->add_flag("--force", runo.force, "write into a non-empty output directory");
  run_cmd->add_flag("--trace", runo.trace, "also dump the per-round flood event log");
  run_cmd->callback([&] {
    if (runo.topology_path.empty() == runo.config_path.empty())
      throw std::invalid_argument("run needs exactly one of --topology or --config");
    bool generated = false;
    Topology topo = [&] {
      if (!runo.topology_path.empty()) return topology_from_json(load_json_file(runo.topology_path));
      TopologyConfig config = topology_config_from_json(load_json_file(runo.config_path));
      if (run_seed->count() > 0) config.seed = runo.seed;
      generated = true;
      return Topology::generate(config);
    }();
    if (runo.initiator >= topo.node_count())
      throw std::invalid_argument("initiator id out of range");

    const ProtocolResult result =
        run_full_protocol(topo, static_cast<NodeId>(runo.initiator), runo.trace);
    const ZonePartition partition = partition_zones(result.coords);
    const ZoneSummary summary = network_zone_summary(partition, topo);

    const auto out_dir = detail::resolve_out_dir(runo.out, runo.force);
    if (generated) save_json_file(out_dir / "topology.json", topology_to_json(topo));
    {
      std::ostringstream os;
      write_coordinates_csv(os, topo, result.coords);
      save_text_file(out_dir / "coordinates.csv", os.str());
    }
    {
      std::ostringstream os;
      write_zone_report_csv(os, topo, partition);
      save_text_file(out_dir / "zones.csv", os.str());
    }
    if (runo.trace) {
      std::ostringstream os;
      write_flood_trace_csv(os, result.traces);
      save_text_file(out_dir / "flood_trace.csv", os.str());
    }
    std::printf("nodes=%zu zones=%zu singletons=%zu mean_zone_size=%s max_zone_size=%s\n",
                topo.node_count(), partition.zones.size(), partition.singleton_count,
                detail::opt_str(summary.mean_zone_size).c_str(),
                detail::opt_str(summary.max_zone_size).c_str());
    std::printf("wrote %s\n", out_dir.string().c_str());
  });

  // sweep
  struct {
    std::string plan_path;
    std::uint64_t seed = 0;
    int jobs = 0;
    int trials = 0;
    double bin_width = 0.0;
    bool paper_scale = false;
    std::string out;
    bool force = false;
  } sw;
  CLI::App* sweep = app.add_subcommand("sweep", "run the full experiment grid");
  sweep->add_option("--plan,--config", sw.plan_path, "experiment plan JSON (default: desk scale)")
      ->check(CLI::ExistingFile);
  CLI::Option* sweep_seed =
      sweep->add_option("--seed", sw.seed, "override the plan base seed")->envname("JUMPS_SEED");
  CLI::Option* sweep_jobs = sweep->add_option("--jobs", sw.jobs, "worker threads (0 = hardware)");
  CLI::Option* sweep_trials = sweep->add_option("--trials", sw.trials, "override trials per cell");
  CLI::Option* sweep_bin =
      sweep->add_option("--bin-width", sw.bin_width, "histogram bin width in radio-range units");
  sweep->add_flag("--paper-scale", sw.paper_scale,
                  "full-scale plan: 1000 m field radius, 1000 trials per cell");
  sweep->add_option("--out", sw.out, "output directory (default: timestamped)");
  sweep->add_flag("--force", sw.force, "write into a non-empty output directory");
  sweep->callback([&] {
    ExperimentPlan plan =
        sw.plan_path.empty() ? desk_scale_plan() : plan_from_json(load_json_file(sw.plan_path));
    if (sw.paper_scale) {
      plan.field_radius = 1000.0;
      plan.trials = 1000;
    }
    if (sweep_seed->count() > 0) plan.base_seed = sw.seed;
    if (sweep_jobs->count() > 0) plan.jobs = sw.jobs;
    if (sweep_trials->count() > 0) plan.trials = sw.trials;
    if (sweep_bin->count() > 0) plan.bin_width = sw.bin_width;
    plan.validate();

    const auto out_dir = detail::resolve_out_dir(sw.out, sw.force);
    const ScenarioResult result = run_plan(plan, [](const CellResult& cell, std::size_t done,
                                                    std::size_t total) {
      const auto zone_size = cell.summary.find(Metric::zone_size);
      std::printf("[%zu/%zu] N=%d d_neig=%d trials=%d exhausted=%d redraws=%lld zone_size=%s%s\n",
                  done, total, cell.landmark_count, cell.density, cell.trials_completed,
                  cell.exhausted_trials, cell.total_redraws,
                  zone_size != cell.summary.end() ? format_double(zone_size->second.mean).c_str()
                                                  : "n/a",
                  cell.unreliable ? " UNRELIABLE" : "");
      std::fflush(stdout);
    });

    save_json_file(out_dir / "plan.json", to_json(plan));
    {
      std::ostringstream os;
      write_results_csv(os, result);
      save_text_file(out_dir / "results.csv", os.str());
    }
    for (const Metric metric : histogram_metrics) {
      if (!plan.selects(metric)) continue;
      std::ostringstream os;
      write_histogram_csv(os, result, metric);
      save_text_file(out_dir / ("hist_" + std::string(metric_name(metric)) + ".csv"), os.str());
    }
    {
      std::ostringstream os;
      write_energy_csv(os, result.energy, provenance_comment(result));
      save_text_file(out_dir / "energy.csv", os.str());
    }
    std::printf("wrote %s (plan_hash=%s)\n", out_dir.string().c_str(),
                to_hex(result.hash).c_str());
    for (const CellResult& cell : result.cells) {
      if (!cell.unreliable && cell.errors.empty()) continue;
      std::printf("cell N=%d d_neig=%d: %d/%d trials, %d exhausted%s\n", cell.landmark_count,
                  cell.density, cell.trials_completed, cell.trials_requested,
                  cell.exhausted_trials, cell.unreliable ? " UNRELIABLE" : "");
      for (const std::string& error : cell.errors) std::printf("    %s\n", error.c_str());
    }
    if (result.any_unreliable()) {
      std::printf("warning: some cells exceeded the 10%% connectivity-failure budget\n");
      exit_code = exit_unreliable;
    }
  });

  // energy
  struct {
    std::string params_path;
    double reference_density = 0.0;
    std::string out;
    bool force = false;
  } en;
  CLI::App* energy = app.add_subcommand("energy", "emit the radio energy model tables");
  energy->add_option("--params", en.params_path, "energy model params JSON")
      ->check(CLI::ExistingFile);
  CLI::Option* energy_d0 =
      energy->add_option("--d0", en.reference_density, "reference neighbor density");
  energy->add_option("--out", en.out, "output directory (default: timestamped)");
  energy->add_flag("--force", en.force, "write into a non-empty output directory");
  energy->callback([&] {
    EnergyModelParams params = en.params_path.empty()
                                   ? EnergyModelParams{}
                                   : energy_params_from_json(load_json_file(en.params_path));
    if (energy_d0->count() > 0) params.reference_density = en.reference_density;
    params.validate();

    std::printf("CC2420 transmit model vs datasheet (reference %s dBm)\n",
                format_double(cc2420_power_levels.front().output_dbm).c_str());
    std::printf("%8s %10s %10s %10s %12s %12s\n", "dBm", "lambda", "range_x", "coverage_x",
                "itx_model", "itx_sheet");
    for (const Cc2420PowerLevel& level : cc2420_power_levels) {
      const double lambda = power_ratio_from_dbm(level.output_dbm);
      const auto [range, coverage] = range_and_coverage_scale(lambda, params.path_loss_exponent);
      const double itx = itx_of_density_ratio(coverage, params);
      std::printf("%8.0f %10.4g %10.4g %10.4g %12.4g %12.4g\n", level.output_dbm, lambda, range,
                  coverage, itx, level.itx_ma);
    }

    const std::vector<int> landmark_counts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<double> densities{10, 20, 30, 40, 50};
    const auto rows = relative_energy_curve(landmark_counts, densities, params);
    const auto out_dir = detail::resolve_out_dir(en.out, en.force);
    std::ostringstream os;
    write_energy_csv(os, rows,
                     "# jumps schema_version=" + std::to_string(k_schema_version) +
                         " d0=" + format_double(params.reference_density));
    save_text_file(out_dir / "energy.csv", os.str());
    std::printf("wrote %s\n", (out_dir / "energy.csv").string().c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConnectivityExhausted& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_connectivity;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_io;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_validation;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_validation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return exit_code;
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("jumps");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace jumps::cli
