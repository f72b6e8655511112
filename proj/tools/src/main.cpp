#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <aqualoc/errors.hpp>
#include <aqualoc/ingest.hpp>

#include "commands.hpp"

using namespace aqualoc;
using namespace aqualoc::tools;

int main(int argc, char** argv) {
  CLI::App app{"aqualoc: invariant-EKF underwater localization and water-quality mapping"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  SimulateOptions sim_opts;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic sensor log and its ground truth");
  simulate->add_option("--config", sim_opts.config, "JSON config (scenario section)")->check(CLI::ExistingFile);
  auto* seed_opt = simulate->add_option("--seed", seed, "Random seed (overrides the config)");
  simulate->add_option("--out", sim_opts.out, "Output directory")->required();
  simulate->add_option("--runs", sim_opts.runs, "Monte Carlo runs with consecutive seeds")->check(CLI::PositiveNumber);

  RunCommandOptions run_opts;
  auto* run = app.add_subcommand("run", "Replay logs through a filter");
  run->add_option("--log", run_opts.logs, "Sensor log, or a batch directory of */log.txt (repeatable)")->required();
  run->add_option("--filter", run_opts.filter, "inekf | ekf | deadreckon")
      ->check(CLI::IsMember({"inekf", "ekf", "deadreckon"}));
  run->add_option("--config", run_opts.config, "JSON config (filter section)")->check(CLI::ExistingFile);
  run->add_option("--out", run_opts.out, "Output directory")->required();

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Error report of an estimate against a reference trajectory");
  evaluate->add_option("--est", eval_opts.est, "Estimated trajectory CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", eval_opts.truth, "Reference trajectory CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval_opts.out, "Directory for report.txt and manifest.json");
  evaluate->add_option("--runtime", eval_opts.runtime_s, "Runtime to report, s");

  MapOptions map_opts;
  std::vector<double> cell, origin;
  auto* map = app.add_subcommand("map", "Grid georeferenced water-quality samples");
  map->add_option("--traj", map_opts.traj, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  map->add_option("--wq", map_opts.wq, "Log holding wq records")->required()->check(CLI::ExistingFile);
  map->add_option("--out", map_opts.out, "Output directory")->required();
  map->add_option("--param", map_opts.param, "Parameter to grid (default: all present)");
  map->add_option("--cell", cell, "Cell size x y z, m")->expected(3);
  map->add_option("--pad", map_opts.pad_cells, "Padding cells around the samples")->check(CLI::NonNegativeNumber);
  map->add_option("--power", map_opts.power, "IDW power")->check(CLI::PositiveNumber);
  map->add_option("--radius", map_opts.radius_cells, "Search radius, cells")->check(CLI::PositiveNumber);
  map->add_option("--origin", origin, "Reference lat lon for the export (default: log header)")->expected(2);

  auto* geo_cmd = app.add_subcommand("geo", "Coordinate conversion about a reference origin");
  geo_cmd->require_subcommand(1);
  double lat = 0, lon = 0, x = 0, y = 0;
  std::vector<double> ref;
  auto* to_local = geo_cmd->add_subcommand("to-local", "lat lon -> x y (m)");
  to_local->add_option("--origin", ref, "Reference lat lon")->expected(2)->required();
  to_local->add_option("--lat", lat)->required();
  to_local->add_option("--lon", lon)->required();
  auto* to_geo = geo_cmd->add_subcommand("to-geo", "x y (m) -> lat lon");
  to_geo->add_option("--origin", ref, "Reference lat lon")->expected(2)->required();
  to_geo->add_option("-x", x)->required();
  to_geo->add_option("-y", y)->required();

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("aqualoc");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::err : spdlog::level::info);

  try {
    if (*simulate) {
      if (*seed_opt) sim_opts.seed = seed;
      cmd_simulate(sim_opts);
    } else if (*run) {
      cmd_run(run_opts);
    } else if (*evaluate) {
      const auto report = cmd_evaluate(eval_opts);
      wqmap::write_report(std::cout, report);
    } else if (*map) {
      if (!cell.empty()) map_opts.cell = Vec3(cell[0], cell[1], cell[2]);
      if (!origin.empty()) map_opts.origin = geo::LatLon{origin[0], origin[1]};
      cmd_map(map_opts);
    } else if (*to_local) {
      const auto xy = geo::to_local(lat, lon, geo::GeoRef(ref[0], ref[1]));
      std::cout << ingest::format_number(xy.x) << ' ' << ingest::format_number(xy.y) << '\n';
    } else if (*to_geo) {
      const auto ll = geo::to_geo(x, y, geo::GeoRef(ref[0], ref[1]));
      std::cout << ingest::format_number(ll.lat) << ' ' << ingest::format_number(ll.lon) << '\n';
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::critical("unexpected failure: {}", e.what());
    return 2;
  }
  return 0;
}
