#pragma once

// Record dispatch shared by the invariant filter and the EKF baseline.
//
// A Policy provides:
//   using State;
//   State init(const GpsSample&);
//   State predict(const State&, const ImuSample&, double dt);
//   UpdateResultT<State> update(const State&, const SensorRecord&, const Vec3& gyro, StepKind&);
//   GroupState as_group_state(const State&);
//   double time(const State&);
//   void set_time(State&, double);

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aqualoc/errors.hpp"
#include "aqualoc/filter.hpp"

namespace aqualoc::detail {

template <typename State>
struct PolicyUpdate {
  State state;
  UpdateStatus status = UpdateStatus::applied;
};

inline const char* record_name(const SensorRecord& r) {
  static constexpr const char* kNames[] = {"imu", "dvl", "depth", "gps", "wq"};
  return kNames[r.index()];
}

inline void check_ordering(const std::vector<SensorRecord>& recs) {
  for (std::size_t i = 1; i < recs.size(); ++i) {
    if (timestamp(recs[i]) < timestamp(recs[i - 1])) {
      std::ostringstream msg;
      msg << "record " << i << " (" << record_name(recs[i]) << ", t=" << timestamp(recs[i]) << ") precedes record "
          << i - 1 << " (t=" << timestamp(recs[i - 1]) << ")";
      throw OrderingError(msg.str());
    }
  }
}

// Updates are applied once the state time reaches their timestamp; the state
// for an IMU timestamp is emitted when the next IMU sample arrives, so it
// includes every update at or before that time.
template <typename Policy>
TrajectoryEstimate replay(const SensorLog& log, Policy& policy, bool corrections, std::optional<typename Policy::State> initial,
                          const std::function<void(StepKind, const GroupState&)>& on_step, std::string name) {
  using State = typename Policy::State;
  TrajectoryEstimate traj;
  traj.filter = std::move(name);
  const auto& recs = log.records;
  if (recs.empty()) return traj;
  check_ordering(recs);

  auto notify = [&](StepKind kind, const State& s) {
    if (on_step) on_step(kind, policy.as_group_state(s));
  };
  auto note = [&](std::size_t i, std::string what) { traj.events.push_back({i, timestamp(recs[i]), std::move(what)}); };

  State state;
  std::size_t start = 0;
  if (initial) {
    state = *initial;
    while (start < recs.size() && timestamp(recs[start]) < policy.time(state)) ++start;
  } else {
    bool found = false;
    for (; start < recs.size(); ++start) {
      if (const auto* g = std::get_if<GpsSample>(&recs[start]); g && g->valid && is_valid(recs[start])) {
        state = policy.init(*g);
        found = true;
        ++start;
        break;
      }
    }
    if (!found) throw InitError("log has no valid GPS fix to initialize from");
  }
  notify(StepKind::init, state);

  std::optional<ImuSample> last_imu;
  std::vector<std::size_t> pending;

  auto apply = [&](std::size_t i) {
    const SensorRecord& rec = recs[i];
    if (std::holds_alternative<DvlSample>(rec) && !last_imu) {
      note(i, "dvl update skipped: no gyro reading yet");
      return;
    }
    StepKind kind = StepKind::gps;
    const Vec3 gyro = last_imu ? last_imu->gyro : Vec3::Zero();
    auto res = policy.update(state, rec, gyro, kind);
    switch (res.status) {
      case UpdateStatus::applied:
        state = std::move(res.state);
        notify(kind, state);
        break;
      case UpdateStatus::skipped_singular:
        note(i, std::string(record_name(rec)) + " update skipped: singular innovation covariance");
        break;
      case UpdateStatus::skipped_invalid:
        note(i, std::string(record_name(rec)) + " update skipped: invalid measurement");
        break;
    }
  };

  auto flush_pending = [&]() {
    std::size_t kept = 0;
    for (std::size_t idx : pending) {
      if (timestamp(recs[idx]) <= policy.time(state)) {
        apply(idx);
      } else {
        pending[kept++] = idx;
      }
    }
    pending.resize(kept);
  };

  for (std::size_t i = start; i < recs.size(); ++i) {
    const SensorRecord& rec = recs[i];
    if (const auto* imu = std::get_if<ImuSample>(&rec)) {
      if (imu->t > policy.time(state)) {
        traj.states.push_back(policy.as_group_state(state));
        if (last_imu) {
          state = policy.predict(state, *last_imu, imu->t - policy.time(state));
          policy.set_time(state, imu->t);
          notify(StepKind::predict, state);
        } else {
          // No input for the span before the first IMU sample.
          policy.set_time(state, imu->t);
        }
        flush_pending();
      }
      last_imu = *imu;
      continue;
    }
    if (!corrections || std::holds_alternative<WqRecord>(rec)) continue;
    if (timestamp(rec) <= policy.time(state)) {
      apply(i);
    } else {
      pending.push_back(i);
    }
  }
  traj.states.push_back(policy.as_group_state(state));
  return traj;
}

}  // namespace aqualoc::detail
