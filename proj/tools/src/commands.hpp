#pragma once

// The subcommands, callable without going through argv.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <aqualoc/geo.hpp>
#include <aqualoc/wqmap.hpp>

namespace aqualoc::tools {

namespace fs = std::filesystem;

struct SimulateOptions {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  fs::path out;
  int runs = 1;  // > 1: out/run_001.. with seeds seed, seed+1, ..
};

// Writes log.txt, truth.csv and manifest.json per run. Returns the run directories.
std::vector<fs::path> cmd_simulate(const SimulateOptions& opts);

struct RunCommandOptions {
  std::vector<fs::path> logs;  // files, or batch directories holding */log.txt
  std::string filter = "inekf";
  std::optional<fs::path> config;
  fs::path out;
};

// Writes trajectory.csv and manifest.json per log; several logs run
// concurrently into out/<name of the log's directory>. Returns the
// trajectory paths.
std::vector<fs::path> cmd_run(const RunCommandOptions& opts);

struct EvaluateOptions {
  fs::path est;
  fs::path truth;
  std::optional<fs::path> out;      // directory for report.txt + manifest.json
  std::optional<double> runtime_s;  // default: manifest.json beside est, else the file header
};

wqmap::ErrorReport cmd_evaluate(const EvaluateOptions& opts);

struct MapOptions {
  fs::path traj;
  fs::path wq;  // sensor log holding wq records (header optional)
  fs::path out;
  std::optional<std::string> param;  // default: every parameter present
  Vec3 cell{1.0, 1.0, 0.25};
  int pad_cells = 0;
  double power = 2.0;
  double radius_cells = 3.0;
  std::optional<geo::LatLon> origin;  // default: the log's @geo_origin
};

// Writes grid_<param>.csv per parameter and manifest.json.
std::vector<wqmap::WqGrid> cmd_map(const MapOptions& opts);

}  // namespace aqualoc::tools
