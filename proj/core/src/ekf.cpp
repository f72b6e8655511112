#include "aqualoc/ekf.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "aqualoc/errors.hpp"
#include "replay.hpp"

namespace aqualoc {
namespace {

Eigen::Quaterniond quat_exp(const Vec3& w) {
  Eigen::Quaterniond q(so3_exp(w));
  return q.normalized();
}

template <int M>
EkfUpdateResult kalman_correct(const EkfState& s, const Eigen::Matrix<double, M, 1>& residual,
                               const Eigen::Matrix<double, M, 9>& h, const Eigen::Matrix<double, M, M>& r) {
  using MatM = Eigen::Matrix<double, M, M>;
  const MatM S = h * s.P * h.transpose() + r;
  if (!S.allFinite()) return {s, UpdateStatus::skipped_singular};
  Eigen::FullPivLU<MatM> lu(S);
  if (!lu.isInvertible()) return {s, UpdateStatus::skipped_singular};
  const Eigen::Matrix<double, 9, M> k = s.P * h.transpose() * lu.inverse();
  const Vec9 dx = k * residual;

  EkfState out = s;
  out.q = (s.q * quat_exp(dx.segment<3>(0))).normalized();
  out.v += dx.segment<3>(3);
  out.p += dx.segment<3>(6);
  out.P = (Mat9::Identity() - k * h) * s.P;
  symmetrize(out.P);
  return {out, UpdateStatus::applied};
}

}  // namespace

GroupState EkfState::as_group_state() const {
  GroupState g;
  g.X.R = q.toRotationMatrix();
  g.X.v = v;
  g.X.p = p;
  g.P = P;
  g.t = t;
  return g;
}

EkfState ekf_init(const GpsSample& first_gps, double first_heading, const FilterConfig& cfg) {
  const GroupState g = init(first_gps, first_heading, cfg);
  EkfState s;
  s.q = Eigen::Quaterniond(Eigen::AngleAxisd(first_heading, Vec3::UnitZ()));
  s.v = g.X.v;
  s.p = g.X.p;
  s.P = g.P;
  s.t = g.t;
  return s;
}

EkfState ekf_predict(const EkfState& s, const ImuSample& imu, double dt, const FilterConfig& cfg) {
  if (!(dt > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive prediction step dt=" << dt << " at t=" << imu.t;
    throw OrderingError(msg.str());
  }
  if (dt > cfg.max_dt) {
    std::ostringstream msg;
    msg << "IMU gap of " << dt << " s at t=" << imu.t << " exceeds " << cfg.max_dt << " s; re-anchor required";
    throw GapError(msg.str());
  }

  const Mat3 r = s.q.toRotationMatrix();
  const Vec3 accel_world = r * imu.accel + cfg.gravity;
  const Mat3 dr = so3_exp(imu.gyro * dt);

  EkfState out;
  out.t = s.t + dt;
  out.q = (s.q * quat_exp(imu.gyro * dt)).normalized();
  out.v = s.v + accel_world * dt;
  out.p = s.p + s.v * dt + 0.5 * accel_world * dt * dt;

  const Mat3 ra_x = r * skew(imu.accel);
  Mat9 f = Mat9::Identity();
  f.block<3, 3>(0, 0) = dr.transpose();
  f.block<3, 3>(3, 0) = -ra_x * dt;
  f.block<3, 3>(6, 0) = -0.5 * ra_x * dt * dt;
  f.block<3, 3>(6, 3) = Mat3::Identity() * dt;

  Mat9 q = Mat9::Zero();
  q.block<3, 3>(0, 0) = cfg.noise.gyro * dt;
  q.block<3, 3>(3, 3) = r * cfg.noise.accel * r.transpose() * dt;

  out.P = f * s.P * f.transpose() + q;
  symmetrize(out.P);
  return out;
}

EkfUpdateResult ekf_update(const EkfState& s, const EkfMeasurement& m, const FilterConfig& cfg, const Vec3& gyro) {
  if (const auto* dvl = std::get_if<DvlSample>(&m)) {
    if (!dvl->valid || !dvl->velocity.allFinite()) return {s, UpdateStatus::skipped_invalid};
    const Mat3 t_x = skew(cfg.dvl.translation);
    const Vec3 v_body = cfg.dvl.rotation * dvl->velocity + t_x * gyro;
    const Mat3 r = s.q.toRotationMatrix();
    const Vec3 predicted = r.transpose() * s.v;
    Eigen::Matrix<double, 3, 9> h = Eigen::Matrix<double, 3, 9>::Zero();
    h.block<3, 3>(0, 0) = skew(predicted);
    h.block<3, 3>(0, 3) = r.transpose();
    const Mat3 noise = cfg.ekf.dvl * Mat3::Identity() + t_x * cfg.noise.gyro * t_x.transpose();
    return kalman_correct<3>(s, v_body - predicted, h, noise);
  }
  if (const auto* d = std::get_if<DepthSample>(&m)) {
    if (!std::isfinite(d->depth)) return {s, UpdateStatus::skipped_invalid};
    Eigen::Matrix<double, 1, 9> h = Eigen::Matrix<double, 1, 9>::Zero();
    h(0, 8) = 1.0;
    Eigen::Matrix<double, 1, 1> residual(-d->depth - s.p.z());
    Eigen::Matrix<double, 1, 1> noise(cfg.ekf.depth);
    return kalman_correct<1>(s, residual, h, noise);
  }
  const auto& g = std::get<GpsSample>(m);
  if (!g.valid || !is_valid(SensorRecord{g}) || !(g.accuracy > 0.0)) return {s, UpdateStatus::skipped_invalid};
  geo::PlanarXY xy;
  try {
    xy = geo::to_local(g.lat, g.lon, cfg.origin);
  } catch (const GeoDomainError&) {
    return {s, UpdateStatus::skipped_invalid};
  }
  Eigen::Matrix<double, 2, 9> h = Eigen::Matrix<double, 2, 9>::Zero();
  h(0, 6) = 1.0;
  h(1, 7) = 1.0;
  const Eigen::Vector2d residual(xy.x - s.p.x(), xy.y - s.p.y());
  const Eigen::Matrix2d noise = g.accuracy * g.accuracy * Eigen::Matrix2d::Identity();
  return kalman_correct<2>(s, residual, h, noise);
}

namespace {

struct EkfPolicy {
  using State = EkfState;
  const FilterConfig& cfg;

  State init(const GpsSample& g) const { return ekf_init(g, cfg.initial_heading.value_or(0.0), cfg); }
  State predict(const State& s, const ImuSample& imu, double dt) const { return ekf_predict(s, imu, dt, cfg); }
  detail::PolicyUpdate<State> update(const State& s, const SensorRecord& rec, const Vec3& gyro, StepKind& kind) const {
    EkfUpdateResult res{s, UpdateStatus::skipped_invalid};
    if (const auto* d = std::get_if<DvlSample>(&rec)) {
      kind = StepKind::dvl;
      res = ekf_update(s, *d, cfg, gyro);
    } else if (const auto* z = std::get_if<DepthSample>(&rec)) {
      kind = StepKind::depth;
      res = ekf_update(s, *z, cfg);
    } else if (const auto* g = std::get_if<GpsSample>(&rec)) {
      kind = StepKind::gps;
      res = ekf_update(s, *g, cfg);
    }
    return {res.state, res.status};
  }
  GroupState as_group_state(const State& s) const { return s.as_group_state(); }
  double time(const State& s) const { return s.t; }
  void set_time(State& s, double t) const { s.t = t; }
};

}  // namespace

TrajectoryEstimate run_ekf(const SensorLog& log, const FilterConfig& cfg, const RunOptions& opts) {
  EkfPolicy policy{cfg};
  std::optional<EkfState> initial;
  if (opts.initial) {
    EkfState s;
    s.q = Eigen::Quaterniond(opts.initial->X.R).normalized();
    s.v = opts.initial->X.v;
    s.p = opts.initial->X.p;
    s.P = opts.initial->P;
    s.t = opts.initial->t;
    initial = s;
  }
  return detail::replay(log, policy, true, initial, opts.on_step, "ekf");
}

}  // namespace aqualoc
