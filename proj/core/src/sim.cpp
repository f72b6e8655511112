#include "aqualoc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "aqualoc/errors.hpp"
#include "aqualoc/geo.hpp"

namespace aqualoc::sim {
namespace {

constexpr double kPi = std::numbers::pi;

// Cubic smoothstep and its first two derivatives with respect to t.
struct Ramp {
  double value, rate, accel;
};

Ramp smoothstep(double t, double duration) {
  if (duration <= 0.0 || t >= duration) return {1.0, 0.0, 0.0};
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  const double u = t / duration;
  return {3 * u * u - 2 * u * u * u, (6 * u - 6 * u * u) / duration, (6 - 12 * u) / (duration * duration)};
}

// Distance travelled, speed and tangential acceleration.
struct Progress {
  double s, speed, accel;
};

Progress progress(const ScenarioConfig& cfg, double t) {
  const double ramp = cfg.ramp_time;
  if (ramp <= 0.0) return {cfg.speed * t, cfg.speed, 0.0};
  if (t >= ramp) return {cfg.speed * (0.5 * ramp + (t - ramp)), cfg.speed, 0.0};
  const double u = std::max(t, 0.0) / ramp;
  const Ramp r = smoothstep(t, ramp);
  return {cfg.speed * ramp * (u * u * u - 0.5 * u * u * u * u), cfg.speed * r.value, cfg.speed * r.rate};
}

// Path point in the scenario's own frame (start at origin, heading east).
struct PathPoint {
  double x, y, heading, curvature;
};

PathPoint path_point(const ScenarioConfig& cfg, double s) {
  switch (cfg.kind) {
    case TrajectoryKind::straight:
      return {s, 0.0, 0.0, 0.0};
    case TrajectoryKind::loiter: {
      const double r = cfg.loiter_radius;
      const double a = s / r;
      return {r * std::sin(a), r - r * std::cos(a), a, 1.0 / r};
    }
    case TrajectoryKind::lawnmower: {
      const double len = cfg.leg_length;
      const double w = cfg.leg_spacing;
      const double r = 0.5 * w;
      const double cycle = len + kPi * r;
      const double k = std::floor(s / cycle);
      const double rem = s - k * cycle;
      const bool eastbound = std::fmod(k, 2.0) == 0.0;
      const double y0 = k * w;
      if (rem < len) {
        return eastbound ? PathPoint{rem, y0, 0.0, 0.0} : PathPoint{len - rem, y0, kPi, 0.0};
      }
      const double a = (rem - len) / r;
      if (eastbound) return {len + r * std::sin(a), y0 + r - r * std::cos(a), a, 1.0 / r};
      return {-r * std::sin(a), y0 + r - r * std::cos(a), kPi - a, -1.0 / r};
    }
  }
  return {0, 0, 0, 0};
}

struct Vertical {
  double z, vz, az;
};

Vertical vertical(const ScenarioConfig& cfg, double t) {
  const double w = 2 * kPi / cfg.depth_period;
  const double d = cfg.depth + cfg.depth_amplitude * std::sin(w * t);
  const double dd = cfg.depth_amplitude * w * std::cos(w * t);
  const double ddd = -cfg.depth_amplitude * w * w * std::sin(w * t);
  const Ramp h = smoothstep(t, cfg.dive_time);
  return {-(d * h.value), -(dd * h.value + d * h.rate), -(ddd * h.value + 2 * dd * h.rate + d * h.accel)};
}

Mat3 yaw_rotation(double psi) { return so3_exp(Vec3(0.0, 0.0, psi)); }

}  // namespace

std::string to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::straight: return "straight";
    case TrajectoryKind::loiter: return "loiter";
    case TrajectoryKind::lawnmower: return "lawnmower";
  }
  return "?";
}

TrajectoryKind parse_trajectory_kind(const std::string& s) {
  if (s == "straight") return TrajectoryKind::straight;
  if (s == "loiter") return TrajectoryKind::loiter;
  if (s == "lawnmower") return TrajectoryKind::lawnmower;
  throw DataError("unknown trajectory kind '" + s + "'");
}

std::string to_string(GpsAvailability a) {
  switch (a) {
    case GpsAvailability::continuous: return "continuous";
    case GpsAvailability::resurfacing: return "resurfacing";
    case GpsAvailability::initial_only: return "initial_only";
  }
  return "?";
}

GpsAvailability parse_gps_availability(const std::string& s) {
  if (s == "continuous") return GpsAvailability::continuous;
  if (s == "resurfacing") return GpsAvailability::resurfacing;
  if (s == "initial_only") return GpsAvailability::initial_only;
  throw DataError("unknown GPS availability '" + s + "'");
}

std::string to_string(FieldFamily f) {
  switch (f) {
    case FieldFamily::constant: return "constant";
    case FieldFamily::linear: return "linear";
    case FieldFamily::plumes: return "plumes";
  }
  return "?";
}

FieldFamily parse_field_family(const std::string& s) {
  if (s == "constant") return FieldFamily::constant;
  if (s == "linear") return FieldFamily::linear;
  if (s == "plumes") return FieldFamily::plumes;
  throw DataError("unknown field family '" + s + "'");
}

bool GpsSchedule::available(double t) const {
  switch (mode) {
    case GpsAvailability::continuous: return true;
    case GpsAvailability::initial_only: return t <= 0.0;
    case GpsAvailability::resurfacing: {
      if (t < 0.0) return false;
      const double phase = std::fmod(t, period);
      return phase < window;
    }
  }
  return false;
}

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError(std::string(what) + " must be positive");
  };
  positive(duration, "duration");
  positive(rates.imu, "imu rate");
  positive(rates.dvl, "dvl rate");
  positive(rates.depth, "depth rate");
  positive(rates.gps, "gps rate");
  positive(rates.wq, "wq rate");
  positive(depth_period, "depth period");
  if (kind == TrajectoryKind::loiter) positive(loiter_radius, "loiter radius");
  if (kind == TrajectoryKind::lawnmower) {
    positive(leg_length, "leg length");
    positive(leg_spacing, "leg spacing");
  }
  if (gps.mode == GpsAvailability::resurfacing) {
    positive(gps.period, "gps period");
    positive(gps.window, "gps window");
  }
  if (speed < 0.0 || ramp_time < 0.0 || dive_time < 0.0) throw DataError("speed and ramp times must be >= 0");
  for (double s : {noise.gyro, noise.accel, noise.dvl, noise.depth, noise.gps, noise.wq}) {
    if (!(s >= 0.0)) throw DataError("noise standard deviations must be >= 0");
  }
}

TruthSample truth_at(const ScenarioConfig& cfg, double t) {
  const Progress pr = progress(cfg, t);
  const PathPoint pt = path_point(cfg, pr.s);
  const Vertical vz = vertical(cfg, t);

  const double psi = cfg.heading + pt.heading;
  const Mat3 frame = yaw_rotation(cfg.heading);
  const Vec3 tangent(std::cos(psi), std::sin(psi), 0.0);
  const Vec3 normal(-std::sin(psi), std::cos(psi), 0.0);

  TruthSample out;
  out.t = t;
  out.X.R = yaw_rotation(psi);
  out.X.p = frame * Vec3(pt.x, pt.y, 0.0) + Vec3(0.0, 0.0, vz.z);
  out.X.v = pr.speed * tangent + Vec3(0.0, 0.0, vz.vz);
  out.accel_world = pr.accel * tangent + pr.speed * pr.speed * pt.curvature * normal + Vec3(0.0, 0.0, vz.az);
  out.omega_body = Vec3(0.0, 0.0, pr.speed * pt.curvature);
  return out;
}

Truth generate_truth(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(std::llround(cfg.duration * cfg.rates.imu));
  Truth truth;
  truth.samples.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    truth.samples.push_back(truth_at(cfg, static_cast<double>(i) / cfg.rates.imu));
  }
  // Positions follow the velocity with constant acceleration over each IMU
  // interval (trapezoid), so integrating the interval-mean IMU reproduces them
  // exactly. The offset from the analytic path stays far below a millimetre.
  for (std::size_t i = 1; i < truth.samples.size(); ++i) {
    const TruthSample& a = truth.samples[i - 1];
    TruthSample& b = truth.samples[i];
    b.X.p = a.X.p + 0.5 * (a.X.v + b.X.v) * (b.t - a.t);
  }
  return truth;
}

namespace {

template <typename Fn>
void for_each_tick(double rate, double duration, Fn&& fn) {
  const auto n = static_cast<std::size_t>(std::llround(duration * rate));
  for (std::size_t i = 0; i <= n; ++i) fn(static_cast<double>(i) / rate);
}

// Truth sample nearest to t (sensor rates divide the IMU rate in practice).
const TruthSample& nearest_sample(const Truth& truth, double t) {
  const auto& ts = truth.samples;
  const double t0 = ts.front().t;
  const double step = ts.size() > 1 ? ts[1].t - t0 : 1.0;
  const auto idx = static_cast<long long>(std::llround((t - t0) / step));
  return ts[static_cast<std::size_t>(std::clamp<long long>(idx, 0, static_cast<long long>(ts.size()) - 1))];
}

}  // namespace

SensorLog sample_sensors(const Truth& truth, const ScenarioConfig& cfg) {
  cfg.validate();
  SensorLog log;
  log.calib = cfg.calib;
  log.calib.initial_heading = cfg.heading;
  log.source = "sim kind=" + to_string(cfg.kind) + " seed=" + std::to_string(cfg.seed);
  if (truth.samples.empty()) return log;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto noise3 = [&](double sd) { return Vec3(sd * unit(rng), sd * unit(rng), sd * unit(rng)); };
  auto noise1 = [&](double sd) { return sd * unit(rng); };

  const Vec3& g = cfg.calib.gravity;
  const double dt = 1.0 / cfg.rates.imu;
  const auto& ts = truth.samples;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const TruthSample& a = ts[i];
    const TruthSample b = i + 1 < ts.size() ? ts[i + 1] : truth_at(cfg, a.t + dt);
    const double step = b.t - a.t;
    // Heading only changes about z, so the rotation increment is a yaw angle.
    const Mat3 dr = a.X.R.transpose() * b.X.R;
    const double dyaw = std::atan2(dr(1, 0), dr(0, 0));
    ImuSample imu;
    imu.t = a.t;
    imu.gyro = Vec3(0.0, 0.0, dyaw / step) + noise3(cfg.noise.gyro);
    imu.accel = a.X.R.transpose() * ((b.X.v - a.X.v) / step - g) + noise3(cfg.noise.accel);
    log.records.emplace_back(imu);
  }

  const double duration = ts.back().t;
  const Mat3& r_di = cfg.calib.dvl.rotation;
  const Mat3 t_x = skew(cfg.calib.dvl.translation);
  for_each_tick(cfg.rates.dvl, duration, [&](double t) {
    const TruthSample& s = nearest_sample(truth, t);
    const Vec3 v_body = s.X.R.transpose() * s.X.v;
    DvlSample d;
    d.t = t;
    d.velocity = r_di.transpose() * (v_body - t_x * s.omega_body) + noise3(cfg.noise.dvl);
    log.records.emplace_back(d);
  });

  for_each_tick(cfg.rates.depth, duration, [&](double t) {
    const TruthSample& s = nearest_sample(truth, t);
    log.records.emplace_back(DepthSample{t, -s.X.p.z() + noise1(cfg.noise.depth)});
  });

  const geo::GeoRef ref(cfg.calib.origin_lat, cfg.calib.origin_lon);
  for_each_tick(cfg.rates.gps, duration, [&](double t) {
    if (!cfg.gps.available(t)) return;
    const TruthSample& s = nearest_sample(truth, t);
    const double x = s.X.p.x() + noise1(cfg.noise.gps);
    const double y = s.X.p.y() + noise1(cfg.noise.gps);
    const geo::LatLon ll = geo::to_geo(x, y, ref);
    GpsSample fix;
    fix.t = t;
    fix.lat = ll.lat;
    fix.lon = ll.lon;
    fix.accuracy = std::max(cfg.noise.gps, 0.05);
    log.records.emplace_back(fix);
  });

  sort_records(log.records);
  return log;
}

double FieldConfig::evaluate(const Vec3& p) const {
  switch (family) {
    case FieldFamily::constant: return base;
    case FieldFamily::linear: return base + gradient.dot(p);
    case FieldFamily::plumes: {
      double v = base;
      for (const Plume& pl : plumes) {
        const Vec3 d = p - pl.center;
        const double q = (d.x() * d.x() + d.y() * d.y()) / (pl.sigma_h * pl.sigma_h) + d.z() * d.z() / (pl.sigma_v * pl.sigma_v);
        v += pl.amplitude * std::exp(-0.5 * q);
      }
      return v;
    }
  }
  return base;
}

std::vector<WqRecord> sample_field(const FieldConfig& field, const Truth& truth, double rate, double noise_std,
                                   std::uint64_t seed) {
  std::vector<WqRecord> out;
  if (truth.samples.empty()) return out;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double t0 = truth.samples.front().t;
  const double t1 = truth.samples.back().t;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * rate + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    const TruthSample& s = nearest_sample(truth, t0 + static_cast<double>(k) / rate);
    double v = field.evaluate(s.X.p);
    if (noise_std > 0.0) v += noise_std * unit(rng);
    out.push_back({s.t, field.param, v});
  }
  return out;
}

TrajectoryEstimate as_trajectory(const Truth& truth) {
  TrajectoryEstimate traj;
  traj.filter = "truth";
  traj.states.reserve(truth.samples.size());
  for (const auto& s : truth.samples) traj.states.push_back({s.X, Mat9::Zero(), s.t});
  return traj;
}

}  // namespace aqualoc::sim
