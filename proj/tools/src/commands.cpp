#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include <aqualoc/ekf.hpp>
#include <aqualoc/errors.hpp>
#include <aqualoc/ingest.hpp>
#include <aqualoc/sim.hpp>

#include "config.hpp"
#include "manifest.hpp"

namespace aqualoc::tools {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

RunConfig config_or_default(const std::optional<fs::path>& path) { return path ? load_config(*path) : RunConfig{}; }

// Runs jobs concurrently; rethrows the first failure after all have finished.
template <typename T, typename Fn>
std::vector<T> fan_out(std::size_t n, Fn job) {
  if (n == 1) return {job(0)};
  std::vector<std::future<T>> futures;
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, job, i));
  std::vector<T> out;
  std::exception_ptr first;
  for (auto& f : futures) {
    try {
      out.push_back(f.get());
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
}

fs::path simulate_one(const RunConfig& cfg, std::uint64_t seed, const fs::path& dir, const SimulateOptions& opts) {
  const auto t0 = Clock::now();
  sim::ScenarioConfig sc = cfg.scenario;
  sc.seed = seed;
  const sim::Truth truth = sim::generate_truth(sc);
  SensorLog log = sim::sample_sensors(truth, sc);
  for (std::size_t i = 0; i < cfg.fields.size(); ++i) {
    const auto recs = sim::sample_field(cfg.fields[i], truth, sc.rates.wq, sc.noise.wq, seed * 1000 + i);
    log.records.insert(log.records.end(), recs.begin(), recs.end());
  }
  sort_records(log.records);
  log.source = "aqualoc simulate " + sim::to_string(sc.kind) + " seed=" + std::to_string(seed);

  make_dir(dir);
  ingest::write_log(dir / "log.txt", log);
  TrajectoryEstimate truth_traj = sim::as_trajectory(truth);
  ingest::write_trajectory(dir / "truth.csv", truth_traj);

  RunManifest m;
  m.command = "simulate";
  m.config = opts.config ? opts.config->string() : "";
  m.seed = seed;
  m.out = dir.string();
  m.outputs = {"log.txt", "truth.csv"};
  m.runtime_s = seconds_since(t0);
  write_manifest(dir, m);
  spdlog::info("simulated {} s {} (seed {}): {} records -> {}", sc.duration, sim::to_string(sc.kind), seed,
               log.records.size(), dir.string());
  return dir;
}

std::vector<fs::path> expand_logs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    if (!fs::is_directory(p)) {
      out.push_back(p);
      continue;
    }
    if (fs::exists(p / "log.txt")) out.push_back(p / "log.txt");
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_directory() && fs::exists(entry.path() / "log.txt")) found.push_back(entry.path() / "log.txt");
    }
    std::sort(found.begin(), found.end());
    if (found.empty() && !fs::exists(p / "log.txt")) throw DataError("no log.txt under " + p.string());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

fs::path run_one(const fs::path& log_path, const RunCommandOptions& opts, const FilterOverrides& overrides,
                 const fs::path& dir) {
  const auto parsed = ingest::parse_log(log_path);
  for (const auto& r : parsed.report.rejects) {
    spdlog::warn("{}:{}: skipped malformed line ({})", log_path.string(), r.line, r.reason);
  }
  if (parsed.log.records.empty()) throw DataError("log " + log_path.string() + " has no records");

  FilterConfig cfg = FilterConfig::from_calibration(parsed.log.calib);
  overrides.apply(cfg);

  const auto t0 = Clock::now();
  TrajectoryEstimate est;
  if (opts.filter == "inekf") {
    est = run_filter(parsed.log, cfg, FilterMode::inekf);
  } else if (opts.filter == "deadreckon") {
    est = run_filter(parsed.log, cfg, FilterMode::deadreckon);
  } else if (opts.filter == "ekf") {
    est = run_ekf(parsed.log, cfg);
  } else {
    throw DataError("unknown filter '" + opts.filter + "' (inekf|ekf|deadreckon)");
  }
  const double runtime = seconds_since(t0);
  for (const auto& e : est.events) spdlog::debug("{}: record {} t={}: {}", log_path.string(), e.record_index, e.t, e.what);
  if (!est.events.empty()) spdlog::warn("{}: {} updates skipped", log_path.string(), est.events.size());

  make_dir(dir);
  // runtime goes to the manifest only, so reruns give byte-identical trajectories
  ingest::write_trajectory(dir / "trajectory.csv", est);

  RunManifest m;
  m.command = "run";
  m.inputs = {log_path.string()};
  m.filter = opts.filter;
  m.config = opts.config ? opts.config->string() : "";
  m.out = dir.string();
  m.outputs = {"trajectory.csv"};
  m.runtime_s = runtime;
  for (const auto& e : est.events) {
    std::ostringstream note;
    note << "record " << e.record_index << " t=" << e.t << ": " << e.what;
    m.notes.push_back(note.str());
  }
  write_manifest(dir, m);
  spdlog::info("{} on {}: {} states in {:.3f} s -> {}", opts.filter, log_path.string(), est.states.size(), runtime,
               dir.string());
  return dir / "trajectory.csv";
}

}  // namespace

std::vector<fs::path> cmd_simulate(const SimulateOptions& opts) {
  if (opts.runs < 1) throw DataError("--runs must be at least 1");
  const RunConfig cfg = config_or_default(opts.config);
  const std::uint64_t base_seed = opts.seed.value_or(cfg.scenario.seed);
  return fan_out<fs::path>(static_cast<std::size_t>(opts.runs), [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03zu", i + 1);
    const fs::path dir = opts.runs == 1 ? opts.out : opts.out / name;
    return simulate_one(cfg, base_seed + i, dir, opts);
  });
}

std::vector<fs::path> cmd_run(const RunCommandOptions& opts) {
  if (opts.filter != "inekf" && opts.filter != "ekf" && opts.filter != "deadreckon") {
    throw DataError("unknown filter '" + opts.filter + "' (inekf|ekf|deadreckon)");
  }
  const std::vector<fs::path> logs = expand_logs(opts.logs);
  if (logs.empty()) throw DataError("no input logs given");
  const FilterOverrides overrides = config_or_default(opts.config).filter;
  return fan_out<fs::path>(logs.size(), [&](std::size_t i) {
    fs::path dir = opts.out;
    if (logs.size() > 1) {
      const fs::path parent = fs::absolute(logs[i]).parent_path();
      dir /= logs[i].stem() == "log" ? parent.filename() : logs[i].stem();
    }
    return run_one(logs[i], opts, overrides, dir);
  });
}

wqmap::ErrorReport cmd_evaluate(const EvaluateOptions& opts) {
  const ingest::TrajectoryFile est = ingest::read_trajectory(opts.est);
  const ingest::TrajectoryFile truth = ingest::read_trajectory(opts.truth);
  if (est.trajectory.states.empty()) throw DataError("estimate " + opts.est.string() + " is empty");
  if (truth.trajectory.states.empty()) throw DataError("truth " + opts.truth.string() + " is empty");

  double runtime = est.runtime_s;
  const fs::path beside = opts.est.parent_path() / "manifest.json";
  if (opts.runtime_s) {
    runtime = *opts.runtime_s;
  } else if (fs::exists(beside)) {
    runtime = read_manifest(beside).runtime_s;
  }

  wqmap::ErrorReport report = wqmap::compute_errors(est.trajectory, truth.trajectory, runtime);
  if (opts.out) {
    make_dir(*opts.out);
    std::ofstream out(*opts.out / "report.txt");
    if (!out) throw Error("cannot write " + (*opts.out / "report.txt").string());
    wqmap::write_report(out, report);
    RunManifest m;
    m.command = "evaluate";
    m.inputs = {opts.est.string(), opts.truth.string()};
    m.filter = report.filter;
    m.out = opts.out->string();
    m.outputs = {"report.txt"};
    m.runtime_s = runtime;
    write_manifest(*opts.out, m);
  }
  return report;
}

std::vector<wqmap::WqGrid> cmd_map(const MapOptions& opts) {
  const ingest::TrajectoryFile traj = ingest::read_trajectory(opts.traj);
  ingest::ParseOptions popts;
  popts.require_calibration = false;
  const auto parsed = ingest::parse_log(opts.wq, popts);
  const std::vector<WqRecord> wq = records_of<WqRecord>(parsed.log);
  if (wq.empty()) throw DataError("no water-quality records in " + opts.wq.string());

  const auto synced = ingest::sync_wq(wq, traj.trajectory);
  if (synced.dropped > 0) spdlog::warn("{} water-quality records had no pose within {} s", synced.dropped, ingest::kSyncTolerance);
  if (synced.samples.empty()) throw DataError("no water-quality record matched a trajectory pose");

  std::vector<WqParameter> params;
  if (opts.param) {
    const auto p = parse_wq_parameter(*opts.param);
    if (!p) throw DataError("unknown water-quality parameter '" + *opts.param + "'");
    params.push_back(*p);
  } else {
    for (const auto& s : synced.samples) {
      if (std::find(params.begin(), params.end(), s.record.param) == params.end()) params.push_back(s.record.param);
    }
    std::sort(params.begin(), params.end());
  }

  const geo::GeoRef ref = opts.origin ? geo::GeoRef(opts.origin->lat, opts.origin->lon)
                                      : geo::GeoRef(parsed.log.calib.origin_lat, parsed.log.calib.origin_lon);
  make_dir(opts.out);
  RunManifest m;
  m.command = "map";
  m.inputs = {opts.traj.string(), opts.wq.string()};
  m.filter = traj.trajectory.filter;
  m.out = opts.out.string();

  const auto t0 = Clock::now();
  std::vector<wqmap::WqGrid> grids;
  for (WqParameter p : params) {
    std::vector<ingest::GeoreferencedSample> mine;
    for (const auto& s : synced.samples) {
      if (s.record.param == p) mine.push_back(s);
    }
    if (mine.empty()) throw DataError("no " + std::string(to_string(p)) + " samples matched a pose");
    wqmap::GridSpec spec = wqmap::GridSpec::covering(mine, opts.cell, opts.pad_cells);
    spec.power = opts.power;
    spec.radius_cells = opts.radius_cells;
    grids.push_back(wqmap::build_grid(mine, p, spec));

    const std::string name = "grid_" + std::string(to_string(p)) + ".csv";
    std::ofstream out(opts.out / name);
    if (!out) throw Error("cannot write " + (opts.out / name).string());
    wqmap::write_grid(out, grids.back(), ref);
    m.outputs.push_back(name);
    spdlog::info("{}: {} samples, {} of {} cells filled -> {}", to_string(p), mine.size(), grids.back().filled_count(),
                 grids.back().size(), name);
  }
  m.runtime_s = seconds_since(t0);
  if (synced.dropped > 0) m.notes.push_back(std::to_string(synced.dropped) + " wq records unmatched");
  write_manifest(opts.out, m);
  return grids;
}

}  // namespace aqualoc::tools
