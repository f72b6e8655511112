#pragma once

// Canonical sensor-log and trajectory files.
//
// Sensor log: UTF-8 text, one item per line.
//   # comment
//   @format aqualoc-log 1
//   @gravity gx gy gz
//   @dvl_rotation r11 r12 r13 r21 r22 r23 r31 r32 r33
//   @dvl_translation tx ty tz
//   @noise_gyro qx qy qz          (variance diagonals)
//   @noise_accel qx qy qz
//   @noise_dvl qx qy qz
//   @noise_pseudo qx qy qz
//   @geo_origin lat lon
//   @initial_heading rad          (optional)
//   @source free text             (optional)
//   t=<s> type=imu gx= gy= gz= ax= ay= az=
//   t=<s> type=dvl vx= vy= vz= valid=0|1
//   t=<s> type=depth d=
//   t=<s> type=gps lat= lon= acc= [valid=0|1]
//   t=<s> type=wq param=<name> value=
//
// Numbers are written in shortest round-trip decimal form.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aqualoc/filter.hpp"
#include "aqualoc/sensors.hpp"

namespace aqualoc::ingest {

struct Reject {
  std::size_t line = 0;  // 1-based
  std::string text;
  std::string reason;
};

struct ParseReport {
  std::size_t data_lines = 0;
  std::size_t records = 0;
  std::size_t reordered = 0;  // records moved by the jitter re-sort
  std::vector<Reject> rejects;
};

struct ParseOptions {
  bool require_calibration = true;
  double max_reject_fraction = 0.01;
  double reorder_tolerance = 0.010;  // s
};

struct ParsedLog {
  SensorLog log;
  ParseReport report;
};

// Throws ParseError when calibration is missing, more than
// max_reject_fraction of the data lines are malformed, or a timestamp falls
// more than reorder_tolerance behind an earlier record.
ParsedLog parse_log(const std::filesystem::path& path, const ParseOptions& opts = {});
ParsedLog parse_log(std::istream& in, const ParseOptions& opts = {});

void write_log(std::ostream& out, const SensorLog& log);
void write_log(const std::filesystem::path& path, const SensorLog& log);

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

struct GeoreferencedSample {
  WqRecord record;
  Vec3 position = Vec3::Zero();
  double pose_t = 0.0;
};

struct SyncResult {
  std::vector<GeoreferencedSample> samples;
  std::size_t dropped = 0;
};

inline constexpr double kSyncTolerance = 0.6;  // s

// Pairs every WQ record with the nearest trajectory pose within `tolerance`.
// Throws DataError if either input is empty or the time ranges do not overlap.
SyncResult sync_wq(const std::vector<WqRecord>& wq, const TrajectoryEstimate& traj,
                   double tolerance = kSyncTolerance);

// Trajectory CSV:
//   # aqualoc-trajectory filter=<name> [runtime_s=<s>]
//   t,x,y,z,vx,vy,vz,qw,qx,qy,qz,var_x,var_y,var_z
struct TrajectoryFile {
  TrajectoryEstimate trajectory;
  double runtime_s = 0.0;
};

void write_trajectory(std::ostream& out, const TrajectoryEstimate& traj, double runtime_s = 0.0);
void write_trajectory(const std::filesystem::path& path, const TrajectoryEstimate& traj, double runtime_s = 0.0);
TrajectoryFile read_trajectory(std::istream& in);
TrajectoryFile read_trajectory(const std::filesystem::path& path);

}  // namespace aqualoc::ingest
