#pragma once

// Right-invariant EKF on SE_2(3) with IMU prediction and DVL, depth and GPS
// corrections.
//
// The invariant error is eta = X_hat * X^{-1}. DVL corrections are applied on
// the left, exp(K r) * X_hat; depth and GPS follow PositionUpdateFrame.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aqualoc/geo.hpp"
#include "aqualoc/liegroup.hpp"
#include "aqualoc/sensors.hpp"

namespace aqualoc {

struct GroupState {
  GroupElement X;
  Mat9 P = 0.1 * Mat9::Identity();
  double t = 0.0;
};

// Position-type corrections (depth, GPS) use H = [0 0 -I].
//   global_right: X_hat * exp(K nu), in the global frame.
//   vehicle_centered: the update runs in a world frame translated to the
//     current position estimate and is applied on the left there, which
//     removes the rotation/position coupling H leaves out far from the origin.
enum class PositionUpdateFrame { vehicle_centered, global_right };

// Conventional EKF measurement variances (per sensor block).
struct EkfMeasurementNoise {
  double dvl = 0.1;    // m^2/s^2, per axis
  double depth = 0.1;  // m^2
};

struct FilterConfig {
  Vec3 gravity{0.0, 0.0, -9.81};
  double initial_p_scale = 0.1;
  NoiseModel noise;
  DvlExtrinsics dvl;
  geo::GeoRef origin;
  std::optional<double> initial_heading;
  double max_dt = 0.5;  // s; larger IMU gaps need re-anchoring
  PositionUpdateFrame depth_frame = PositionUpdateFrame::global_right;
  PositionUpdateFrame gps_frame = PositionUpdateFrame::vehicle_centered;
  double gps_vertical_variance = 1e6;  // m^2
  EkfMeasurementNoise ekf;

  // Takes gravity, extrinsics, noise, origin and heading from a log header.
  static FilterConfig from_calibration(const Calibration& c);
};

enum class UpdateStatus { applied, skipped_singular, skipped_invalid };

struct UpdateResult {
  GroupState state;
  UpdateStatus status = UpdateStatus::applied;
};

GroupState init(const GpsSample& first_gps, double first_heading, const FilterConfig& cfg);

// Throws OrderingError if dt <= 0 and GapError if dt > cfg.max_dt.
GroupState predict(const GroupState& s, const ImuSample& imu, double dt, const FilterConfig& cfg);

// `gyro` is the most recent angular rate, used for the DVL lever arm.
UpdateResult update_dvl(const GroupState& s, const DvlSample& dvl, const Vec3& gyro, const FilterConfig& cfg);
UpdateResult update_depth(const GroupState& s, const DepthSample& d, const FilterConfig& cfg);
UpdateResult update_gps(const GroupState& s, const GpsSample& g, const FilterConfig& cfg);

// Error-state transition of the prediction step, exp(A dt).
Mat9 transition_matrix(const Vec3& gravity, double dt);

// In-place P <- (P + P^T) / 2.
void symmetrize(Mat9& p);

enum class FilterMode { inekf, deadreckon };

enum class StepKind { init, predict, dvl, depth, gps };

struct RunEvent {
  std::size_t record_index = 0;
  double t = 0.0;
  std::string what;
};

struct TrajectoryEstimate {
  std::string filter;
  std::vector<GroupState> states;
  std::vector<RunEvent> events;
};

struct RunOptions {
  std::optional<GroupState> initial;
  // Called after every state change, including updates.
  std::function<void(StepKind, const GroupState&)> on_step;
};

// Processes a time-ordered log. Emits one state per IMU timestamp.
// Throws OrderingError for out-of-order records, GapError for IMU gaps and
// InitError when the log has records but no GPS fix to start from.
TrajectoryEstimate run_filter(const SensorLog& log, const FilterConfig& cfg, FilterMode mode,
                              const RunOptions& opts = {});

std::string to_string(FilterMode m);

}  // namespace aqualoc
