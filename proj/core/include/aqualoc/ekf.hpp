#pragma once

// Conventional error-state EKF over attitude (unit quaternion), velocity and
// position. Attitude errors are local: R = R_hat * Exp(dtheta).

#include <variant>

#include <Eigen/Geometry>

#include "aqualoc/filter.hpp"

namespace aqualoc {

struct EkfState {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  Mat9 P = 0.1 * Mat9::Identity();  // (dtheta, dv, dp)
  double t = 0.0;

  GroupState as_group_state() const;
};

struct EkfUpdateResult {
  EkfState state;
  UpdateStatus status = UpdateStatus::applied;
};

EkfState ekf_init(const GpsSample& first_gps, double first_heading, const FilterConfig& cfg);

// Same mean propagation as predict(); throws OrderingError if dt <= 0 and
// GapError if dt > cfg.max_dt.
EkfState ekf_predict(const EkfState& s, const ImuSample& imu, double dt, const FilterConfig& cfg);

using EkfMeasurement = std::variant<DvlSample, DepthSample, GpsSample>;

// `gyro` feeds the DVL lever-arm term and is ignored for other sensors.
EkfUpdateResult ekf_update(const EkfState& s, const EkfMeasurement& m, const FilterConfig& cfg,
                           const Vec3& gyro = Vec3::Zero());

TrajectoryEstimate run_ekf(const SensorLog& log, const FilterConfig& cfg, const RunOptions& opts = {});

}  // namespace aqualoc
