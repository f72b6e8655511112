#pragma once

// Ground-truth trajectories and synthetic sensor logs.
//
// Vehicles move in the horizontal plane along an analytic path with heading
// equal to the path tangent (no roll or pitch) while following a depth
// profile. Speed and depth ramp in smoothly from rest at the surface unless
// the ramp times are zero.

#include <cstdint>
#include <string>
#include <vector>

#include "aqualoc/filter.hpp"
#include "aqualoc/sensors.hpp"

namespace aqualoc::sim {

enum class TrajectoryKind { straight, loiter, lawnmower };

std::string to_string(TrajectoryKind k);
TrajectoryKind parse_trajectory_kind(const std::string& s);

// Per-sample standard deviations.
struct NoiseStd {
  double gyro = 0.005;   // rad/s
  double accel = 0.05;   // m/s^2
  double dvl = 0.02;     // m/s
  double depth = 0.01;   // m
  double gps = 1.0;      // m, per horizontal axis
  double wq = 0.0;       // parameter units

  static NoiseStd zero() { return {0, 0, 0, 0, 0, 0}; }
};

enum class GpsAvailability { continuous, resurfacing, initial_only };

std::string to_string(GpsAvailability a);
GpsAvailability parse_gps_availability(const std::string& s);

struct GpsSchedule {
  GpsAvailability mode = GpsAvailability::continuous;
  double window = 10.0;   // s at the surface
  double period = 120.0;  // s between window starts

  bool available(double t) const;
};

struct Rates {
  double imu = 100.0;
  double dvl = 20.0;
  double depth = 20.0;
  double gps = 5.0;
  double wq = 1.0;
};

struct ScenarioConfig {
  TrajectoryKind kind = TrajectoryKind::lawnmower;
  double speed = 1.0;            // m/s
  double depth = 0.2;            // m below the surface
  double depth_amplitude = 0.0;  // m, sinusoidal excursion around `depth`
  double depth_period = 60.0;    // s
  double duration = 100.0;       // s
  double ramp_time = 5.0;        // s, speed ramp from rest
  double dive_time = 5.0;        // s, dive from the surface
  double heading = 0.0;          // rad, initial heading from east
  double leg_length = 20.0;      // m (lawnmower)
  double leg_spacing = 5.0;      // m (lawnmower)
  double loiter_radius = 10.0;   // m
  Rates rates;
  NoiseStd noise;
  GpsSchedule gps;
  std::uint64_t seed = 1;
  Calibration calib;  // gravity, DVL extrinsics, geodetic origin written to the log

  // Throws DataError for non-positive rates/duration or negative noise.
  void validate() const;
};

struct TruthSample {
  double t = 0.0;
  GroupElement X;
  Vec3 accel_world = Vec3::Zero();  // m/s^2, analytic
  Vec3 omega_body = Vec3::Zero();   // rad/s, analytic
};

struct Truth {
  std::vector<TruthSample> samples;  // at IMU rate, t = 0 .. duration
};

// Analytic state at an arbitrary time.
TruthSample truth_at(const ScenarioConfig& cfg, double t);

Truth generate_truth(const ScenarioConfig& cfg);

// Interleaved, time-ordered log. IMU samples carry the interval-mean angular
// rate and specific force over [t_k, t_k+1], the form a delta-angle /
// delta-velocity IMU reports.
SensorLog sample_sensors(const Truth& truth, const ScenarioConfig& cfg);

enum class FieldFamily { constant, linear, plumes };

struct Plume {
  Vec3 center = Vec3::Zero();
  double amplitude = 1.0;
  double sigma_h = 5.0;  // m
  double sigma_v = 1.0;  // m
};

struct FieldConfig {
  WqParameter param = WqParameter::temperature;
  FieldFamily family = FieldFamily::constant;
  double base = 0.0;
  Vec3 gradient = Vec3::Zero();  // units per m (linear)
  std::vector<Plume> plumes;

  double evaluate(const Vec3& p) const;
};

std::string to_string(FieldFamily f);
FieldFamily parse_field_family(const std::string& s);

// One record per 1/rate seconds at the true position.
std::vector<WqRecord> sample_field(const FieldConfig& field, const Truth& truth, double rate = 1.0,
                                   double noise_std = 0.0, std::uint64_t seed = 1);

// Truth as a trajectory (covariances zero), for evaluation.
TrajectoryEstimate as_trajectory(const Truth& truth);

}  // namespace aqualoc::sim
