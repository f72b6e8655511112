#include "aqualoc/filter.hpp"

#include <cmath>
#include <sstream>
#include <Eigen/Dense>

#include "aqualoc/errors.hpp"
#include "replay.hpp"

namespace aqualoc {
namespace {

using Mat39 = Eigen::Matrix<double, 3, 9>;
using Mat93 = Eigen::Matrix<double, 9, 3>;
using Mat59 = Eigen::Matrix<double, 5, 9>;

const Vec5 kVelocityAnchor = (Vec5() << 0, 0, 0, 1, 0).finished();  // b_D
const Vec5 kPositionAnchor = (Vec5() << 0, 0, 0, 0, 1).finished();  // b_depth

// H for an observation y = X^{-1} b with b = e4 (velocity) or e5 (position):
// the informative rows are -I on the matching tangent block.
Mat59 observation_matrix(int block) {
  Mat59 h = Mat59::Zero();
  h.block<3, 3>(0, 3 * block) = -Mat3::Identity();
  return h;
}

Mat5 pad_covariance(const Mat3& q) {
  Mat5 out = Mat5::Zero();
  out.topLeftCorner<3, 3>() = q;
  return out;
}

struct Gain {
  Mat93 K;
  Mat39 H;
};

// Kalman gain on the 3 informative rows. Returns nullopt when S is singular.
std::optional<Gain> informative_gain(const Mat9& p, const Mat59& h5, const Mat3& noise) {
  const Mat39 h = h5.topRows<3>();
  const Mat3 s = h * p * h.transpose() + noise;
  if (!s.allFinite()) return std::nullopt;
  Eigen::FullPivLU<Mat3> lu(s);
  if (!lu.isInvertible()) return std::nullopt;
  // S is symmetric; K = P H^T S^{-1}.
  const Mat93 k = p * h.transpose() * lu.inverse();
  if (!k.allFinite()) return std::nullopt;
  return Gain{k, h};
}

Mat9 corrected_covariance(const Mat9& p, const Gain& g) {
  Mat9 out = (Mat9::Identity() - g.K * g.H) * p;
  symmetrize(out);
  return out;
}

// Position-type update shared by depth and GPS: the pseudo-measured position
// is converted to the right-invariant form -R^T p, innovation X y - b, with
// H = [0 0 -I].
//
// vehicle_centered: the update runs in a world frame translated so that the
// estimate sits at the origin (X -> T X, P -> Ad_T P Ad_T^T with T a pure
// translation by -p_hat), where the omitted rotation/position coupling of H
// vanishes, and the result is translated back.
// global_right: the update runs in the global frame and the correction is
// right-multiplied, X_hat * exp(K nu).
UpdateResult position_update(const GroupState& s, const Vec3& measured, const Mat3& noise, PositionUpdateFrame frame) {
  GroupElement x = s.X;
  Mat9 p = s.P;
  Vec3 target = measured;
  GroupElement shift;
  if (frame == PositionUpdateFrame::vehicle_centered) {
    shift.p = -x.p;
    const Mat9 ad = adjoint(shift);
    x = compose(shift, x);
    p = ad * p * ad.transpose();
    target -= s.X.p;
  }

  Vec5 y = kPositionAnchor;
  y.head<3>() = -x.R.transpose() * target;
  const Vec5 nu = x.matrix() * y - kPositionAnchor;

  const Mat59 h = observation_matrix(2);
  const Mat5 q_bar = pad_covariance(noise);
  const auto gain = informative_gain(p, h, q_bar.topLeftCorner<3, 3>());
  if (!gain) return {s, UpdateStatus::skipped_singular};

  const TangentVector delta = gain->K * nu.head<3>();
  GroupState out = s;
  if (frame == PositionUpdateFrame::global_right) {
    out.X = compose(x, se23_exp(delta));
    out.P = corrected_covariance(p, *gain);
    return {out, UpdateStatus::applied};
  }
  const GroupElement back = inverse(shift);
  const Mat9 ad_back = adjoint(back);
  out.X = compose(back, compose(se23_exp(delta), x));
  out.P = ad_back * corrected_covariance(p, *gain) * ad_back.transpose();
  symmetrize(out.P);
  return {out, UpdateStatus::applied};
}

}  // namespace

FilterConfig FilterConfig::from_calibration(const Calibration& c) {
  FilterConfig cfg;
  cfg.gravity = c.gravity;
  cfg.noise = c.noise;
  cfg.dvl = c.dvl;
  cfg.origin = geo::GeoRef(c.origin_lat, c.origin_lon);
  cfg.initial_heading = c.initial_heading;
  return cfg;
}

void symmetrize(Mat9& p) { p = 0.5 * (p + p.transpose()).eval(); }

Mat9 transition_matrix(const Vec3& gravity, double dt) {
  // A = [0 0 0; (g)x 0 0; 0 I 0] is nilpotent (A^3 = 0), so the series ends.
  Mat9 phi = Mat9::Identity();
  const Mat3 gx = skew(gravity);
  phi.block<3, 3>(3, 0) = gx * dt;
  phi.block<3, 3>(6, 3) = Mat3::Identity() * dt;
  phi.block<3, 3>(6, 0) = 0.5 * gx * dt * dt;
  return phi;
}

GroupState init(const GpsSample& first_gps, double first_heading, const FilterConfig& cfg) {
  if (!first_gps.valid || !is_valid(SensorRecord{first_gps})) {
    throw InitError("cannot initialize from an invalid GPS fix");
  }
  if (!std::isfinite(first_heading)) throw InitError("initial heading is not finite");
  const auto xy = geo::to_local(first_gps.lat, first_gps.lon, cfg.origin);
  GroupState s;
  s.X.R = so3_exp(Vec3(0.0, 0.0, first_heading));
  s.X.v = Vec3::Zero();
  s.X.p = Vec3(xy.x, xy.y, 0.0);
  s.P = cfg.initial_p_scale * Mat9::Identity();
  s.t = first_gps.t;
  return s;
}

GroupState predict(const GroupState& s, const ImuSample& imu, double dt, const FilterConfig& cfg) {
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

  const GroupElement& x = s.X;
  const Vec3 accel_world = x.R * imu.accel + cfg.gravity;

  GroupState out;
  out.t = s.t + dt;
  out.X.R = x.R * so3_exp(imu.gyro * dt);
  out.X.v = x.v + accel_world * dt;
  out.X.p = x.p + x.v * dt + 0.5 * accel_world * dt * dt;

  Mat9 q = Mat9::Zero();
  q.block<3, 3>(0, 0) = cfg.noise.gyro;
  q.block<3, 3>(3, 3) = cfg.noise.accel;
  const Mat9 phi = transition_matrix(cfg.gravity, dt);
  const Mat9 ad = adjoint(x);
  const Mat9 phi_ad = phi * ad;
  out.P = phi * s.P * phi.transpose() + phi_ad * q * phi_ad.transpose() * dt;
  symmetrize(out.P);
  return out;
}

UpdateResult update_dvl(const GroupState& s, const DvlSample& dvl, const Vec3& gyro, const FilterConfig& cfg) {
  if (!dvl.valid || !dvl.velocity.allFinite() || !gyro.allFinite()) return {s, UpdateStatus::skipped_invalid};

  const Mat3& r_di = cfg.dvl.rotation;
  const Mat3 t_x = skew(cfg.dvl.translation);
  const Vec3 v_body = r_di * dvl.velocity + t_x * gyro;
  const Mat3 q_v = r_di * cfg.noise.dvl * r_di.transpose() + t_x * cfg.noise.gyro * t_x.transpose();

  // y = X^{-1} b_D = (-R^T v, 1, 0), so the measured body velocity enters negated.
  const GroupElement& x = s.X;
  Vec5 y = kVelocityAnchor;
  y.head<3>() = -v_body;
  Vec5 y_hat = kVelocityAnchor;
  y_hat.head<3>() = -x.R.transpose() * x.v;
  const Mat5 xm = x.matrix();
  const Vec5 innovation = xm * (y - y_hat);

  const Mat59 h = observation_matrix(1);
  const Mat5 noise = xm * pad_covariance(q_v) * xm.transpose();
  const auto gain = informative_gain(s.P, h, noise.topLeftCorner<3, 3>());
  if (!gain) return {s, UpdateStatus::skipped_singular};

  GroupState out = s;
  out.X = compose(se23_exp(gain->K * innovation.head<3>()), x);
  out.P = corrected_covariance(s.P, *gain);
  return {out, UpdateStatus::applied};
}

UpdateResult update_depth(const GroupState& s, const DepthSample& d, const FilterConfig& cfg) {
  if (!std::isfinite(d.depth)) return {s, UpdateStatus::skipped_invalid};
  const Vec3 measured(s.X.p.x(), s.X.p.y(), -d.depth);
  return position_update(s, measured, cfg.noise.pseudo, cfg.depth_frame);
}

UpdateResult update_gps(const GroupState& s, const GpsSample& g, const FilterConfig& cfg) {
  if (!g.valid || !is_valid(SensorRecord{g}) || !(g.accuracy > 0.0)) return {s, UpdateStatus::skipped_invalid};
  geo::PlanarXY xy;
  try {
    xy = geo::to_local(g.lat, g.lon, cfg.origin);
  } catch (const GeoDomainError&) {
    return {s, UpdateStatus::skipped_invalid};
  }
  const double var = g.accuracy * g.accuracy;
  const Mat3 noise = Vec3(var, var, cfg.gps_vertical_variance).asDiagonal();
  return position_update(s, Vec3(xy.x, xy.y, s.X.p.z()), noise, cfg.gps_frame);
}

std::string to_string(FilterMode m) { return m == FilterMode::inekf ? "inekf" : "deadreckon"; }

namespace {

struct InvariantPolicy {
  using State = GroupState;
  const FilterConfig& cfg;

  State init(const GpsSample& g) const { return aqualoc::init(g, cfg.initial_heading.value_or(0.0), cfg); }
  State predict(const State& s, const ImuSample& imu, double dt) const { return aqualoc::predict(s, imu, dt, cfg); }
  detail::PolicyUpdate<State> update(const State& s, const SensorRecord& rec, const Vec3& gyro, StepKind& kind) const {
    UpdateResult res{s, UpdateStatus::skipped_invalid};
    if (const auto* d = std::get_if<DvlSample>(&rec)) {
      kind = StepKind::dvl;
      res = update_dvl(s, *d, gyro, cfg);
    } else if (const auto* z = std::get_if<DepthSample>(&rec)) {
      kind = StepKind::depth;
      res = update_depth(s, *z, cfg);
    } else if (const auto* g = std::get_if<GpsSample>(&rec)) {
      kind = StepKind::gps;
      res = update_gps(s, *g, cfg);
    }
    return {res.state, res.status};
  }
  GroupState as_group_state(const State& s) const { return s; }
  double time(const State& s) const { return s.t; }
  void set_time(State& s, double t) const { s.t = t; }
};

}  // namespace

TrajectoryEstimate run_filter(const SensorLog& log, const FilterConfig& cfg, FilterMode mode, const RunOptions& opts) {
  InvariantPolicy policy{cfg};
  return detail::replay(log, policy, mode == FilterMode::inekf, opts.initial, opts.on_step, to_string(mode));
}

}  // namespace aqualoc
