#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aqualoc/liegroup.hpp"

namespace aqualoc {

struct ImuSample {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();   // rad/s, body frame
  Vec3 accel = Vec3::Zero();  // m/s^2, body frame, specific force
};

struct DvlSample {
  double t = 0.0;
  Vec3 velocity = Vec3::Zero();  // m/s, DVL frame
  bool valid = true;
};

// Pressure-derived depth, positive down. World z is -depth.
struct DepthSample {
  double t = 0.0;
  double depth = 0.0;
};

struct GpsSample {
  double t = 0.0;
  double lat = 0.0;  // deg
  double lon = 0.0;  // deg
  double accuracy = 1.0;  // horizontal 1-sigma, m
  bool valid = true;
};

enum class WqParameter { chlorophyll, temperature, ph, tss, salinity, tds };

std::string_view to_string(WqParameter p);
std::optional<WqParameter> parse_wq_parameter(std::string_view name);
std::string_view units(WqParameter p);

struct WqRecord {
  double t = 0.0;
  WqParameter param = WqParameter::temperature;
  double value = 0.0;
};

using SensorRecord = std::variant<ImuSample, DvlSample, DepthSample, GpsSample, WqRecord>;

double timestamp(const SensorRecord& r);

// Sorts by timestamp; ties keep GPS first, then IMU, then the rest in type
// order, so a fix at the first IMU time can initialize a filter.
void sort_records(std::vector<SensorRecord>& recs);

// Checks the per-type invariants (finite values, lat/lon ranges).
bool is_valid(const SensorRecord& r);

// Diagonal-by-default noise covariances.
struct NoiseModel {
  Mat3 gyro = 0.1 * Mat3::Identity();    // Q_w, rad^2/s^2
  Mat3 accel = 0.1 * Mat3::Identity();   // Q_a, m^2/s^4
  Mat3 dvl = 0.1 * Mat3::Identity();     // Q_D, m^2/s^2
  Mat3 pseudo = Vec3(1e6, 1e6, 1e-4).asDiagonal();  // Q_P, m^2
};

struct DvlExtrinsics {
  Mat3 rotation = Mat3::Identity();  // R_DI
  Vec3 translation = Vec3::Zero();   // t_DI, m
};

// Calibration carried in a log header.
struct Calibration {
  Vec3 gravity{0.0, 0.0, -9.81};
  DvlExtrinsics dvl;
  NoiseModel noise;
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  std::optional<double> initial_heading;  // rad, yaw from east
};

struct SensorLog {
  std::vector<SensorRecord> records;
  Calibration calib;
  std::string source;
};

template <typename T>
std::vector<T> records_of(const SensorLog& log) {
  std::vector<T> out;
  for (const auto& r : log.records) {
    if (const auto* x = std::get_if<T>(&r)) out.push_back(*x);
  }
  return out;
}

}  // namespace aqualoc
