#include <benchmark/benchmark.h>

#include <aqualoc/ekf.hpp>
#include <aqualoc/filter.hpp>
#include <aqualoc/sim.hpp>

using namespace aqualoc;

namespace {

GroupState moving_state() {
  GroupState s;
  s.X = se23_exp(make_tangent(Vec3(0.01, -0.02, 0.7), Vec3(0.8, 0.3, -0.05), Vec3(12.0, -4.0, -0.5)));
  return s;
}

const ImuSample kImu{0.0, Vec3(0.001, -0.002, 0.05), Vec3(0.1, 0.02, 9.81)};

void BM_InekfPredict(benchmark::State& state) {
  const FilterConfig cfg;
  GroupState s = moving_state();
  for (auto _ : state) {
    s = predict(s, kImu, 0.01, cfg);
    benchmark::DoNotOptimize(s);
    s.P = 0.1 * Mat9::Identity();
  }
}
BENCHMARK(BM_InekfPredict);

void BM_InekfDvlUpdate(benchmark::State& state) {
  const FilterConfig cfg;
  const GroupState s = moving_state();
  const DvlSample dvl{0.0, Vec3(0.85, 0.0, 0.0), true};
  for (auto _ : state) benchmark::DoNotOptimize(update_dvl(s, dvl, kImu.gyro, cfg));
}
BENCHMARK(BM_InekfDvlUpdate);

void BM_InekfDepthUpdate(benchmark::State& state) {
  const FilterConfig cfg;
  const GroupState s = moving_state();
  for (auto _ : state) benchmark::DoNotOptimize(update_depth(s, DepthSample{0.0, 0.52}, cfg));
}
BENCHMARK(BM_InekfDepthUpdate);

void BM_EkfPredict(benchmark::State& state) {
  const FilterConfig cfg;
  GpsSample g;
  EkfState s = ekf_init(g, 0.3, cfg);
  for (auto _ : state) {
    s = ekf_predict(s, kImu, 0.01, cfg);
    benchmark::DoNotOptimize(s);
    s.P = 0.1 * Mat9::Identity();
  }
}
BENCHMARK(BM_EkfPredict);

const SensorLog& log_300s() {
  static const SensorLog log = [] {
    sim::ScenarioConfig sc;
    sc.duration = 300.0;
    sc.gps.mode = sim::GpsAvailability::initial_only;
    return sim::sample_sensors(sim::generate_truth(sc), sc);
  }();
  return log;
}

void BM_Replay300s(benchmark::State& state) {
  const SensorLog& log = log_300s();
  const FilterConfig cfg = FilterConfig::from_calibration(log.calib);
  const int which = static_cast<int>(state.range(0));
  for (auto _ : state) {
    if (which == 0) benchmark::DoNotOptimize(run_filter(log, cfg, FilterMode::inekf));
    if (which == 1) benchmark::DoNotOptimize(run_ekf(log, cfg));
    if (which == 2) benchmark::DoNotOptimize(run_filter(log, cfg, FilterMode::deadreckon));
  }
  state.SetLabel(which == 0 ? "inekf" : which == 1 ? "ekf" : "deadreckon");
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.records.size()));
}
BENCHMARK(BM_Replay300s)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
