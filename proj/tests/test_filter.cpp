#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include <aqualoc/errors.hpp>
#include <aqualoc/filter.hpp>
#include <aqualoc/geo.hpp>
#include <aqualoc/sim.hpp>

#include "support/oracles.hpp"

using namespace aqualoc;
using aqualoc::testing::Random;

namespace {

constexpr double kPi = std::numbers::pi;

GpsSample fix_at(double x, double y, const FilterConfig& cfg, double t = 0.0, double accuracy = 1.0) {
  const geo::LatLon ll = geo::to_geo(x, y, cfg.origin);
  return GpsSample{t, ll.lat, ll.lon, accuracy, true};
}

GroupState state_with(const GroupElement& x, double p_scale = 0.1) {
  GroupState s;
  s.X = x;
  s.P = p_scale * Mat9::Identity();
  return s;
}

GroupElement yaw_only(Random& rnd) {
  GroupElement x;
  x.R = so3_exp(Vec3(0, 0, rnd.uniform(-kPi, kPi)));
  x.v = rnd.vec3(2.0);
  x.p = rnd.vec3(50.0);
  return x;
}

Mat9 random_covariance(Random& rnd) {
  Mat9 a;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) a(i, j) = rnd.uniform(-0.3, 0.3);
  return a * a.transpose() + 0.01 * Mat9::Identity();
}

void expect_healthy(const Mat9& p) {
  EXPECT_LE((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat9>(p).eigenvalues().minCoeff(), -1e-9);
}

// IMU sample holding the vehicle still in the world frame.
ImuSample still(const GroupElement& x, const FilterConfig& cfg) { return ImuSample{0.0, Vec3::Zero(), -x.R.transpose() * cfg.gravity}; }

}  // namespace

TEST(FilterInit, AtOriginIsIdentity) {
  FilterConfig cfg;
  cfg.origin = geo::GeoRef(38.0, -76.4);
  const GroupState s = init(fix_at(0, 0, cfg), 0.0, cfg);
  EXPECT_TRUE(s.X.is_approx(GroupElement::identity(), 1e-9));
  EXPECT_TRUE(s.P.isApprox(0.1 * Mat9::Identity()));
}

TEST(FilterInit, HeadingAndScale) {
  FilterConfig cfg;
  cfg.initial_p_scale = 0.5;
  const GroupState s = init(fix_at(0, 0, cfg), kPi / 2, cfg);
  EXPECT_TRUE(s.X.R.isApprox(so3_exp(Vec3(0, 0, kPi / 2))));
  EXPECT_TRUE(s.X.p.isZero(1e-9));
  EXPECT_TRUE(s.X.v.isZero(0.0));
  EXPECT_TRUE(s.P.isApprox(0.5 * Mat9::Identity()));
}

TEST(FilterInit, PositionFromFix) {
  FilterConfig cfg;
  cfg.origin = geo::GeoRef(45.0, 10.0);
  const GroupState s = init(fix_at(120.0, -35.0, cfg, 3.0), 0.0, cfg);
  EXPECT_NEAR(s.X.p.x(), 120.0, 1e-6);
  EXPECT_NEAR(s.X.p.y(), -35.0, 1e-6);
  EXPECT_EQ(s.X.p.z(), 0.0);
  EXPECT_EQ(s.t, 3.0);
}

TEST(FilterInit, InvalidFixThrows) {
  FilterConfig cfg;
  GpsSample bad{0.0, 0.0, 0.0, 1.0, false};
  EXPECT_THROW(init(bad, 0.0, cfg), InitError);
  GpsSample nan{0.0, std::nan(""), 0.0, 1.0, true};
  EXPECT_THROW(init(nan, 0.0, cfg), InitError);
}

TEST(FilterPredict, GravityCompensatedIsStationary) {
  Random rnd;
  FilterConfig cfg;
  for (double dt : {0.001, 0.01, 0.3}) {
    GroupState s = state_with(rnd.element());
    s.X.v.setZero();
    const GroupState out = predict(s, still(s.X, cfg), dt, cfg);
    EXPECT_TRUE(out.X.R.isApprox(s.X.R, 1e-14));
    EXPECT_LT(out.X.v.norm(), 1e-14);
    EXPECT_LT((out.X.p - s.X.p).norm(), 1e-12);
  }
}

TEST(FilterPredict, ConstantAccelerationArithmetic) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  const ImuSample imu{0.0, Vec3::Zero(), Vec3(1, 0, 0) - cfg.gravity};
  const GroupState out = predict(s, imu, 0.1, cfg);
  EXPECT_LT((out.X.v - Vec3(0.1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((out.X.p - Vec3(0.005, 0, 0)).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(out.t, 0.1);
}

TEST(FilterPredict, CovarianceGrows) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  const GroupState out = predict(s, still(s.X, cfg), 0.01, cfg);
  EXPECT_GT(out.P.trace(), s.P.trace());
}

TEST(FilterPredict, TransitionMatrixIsExponential) {
  Random rnd;
  for (int i = 0; i < 100; ++i) {
    const Vec3 g = rnd.vec3(10.0);
    const double dt = rnd.uniform(0.0, 0.5);
    Mat9 a = Mat9::Zero();
    a.block<3, 3>(3, 0) = skew(g);
    a.block<3, 3>(6, 3) = Mat3::Identity();
    EXPECT_LT((transition_matrix(g, dt) - aqualoc::testing::series_exp<Mat9>(a * dt)).norm(), 1e-12);
  }
}

TEST(FilterPredict, CovarianceMatchesPropagationFormula) {
  Random rnd;
  FilterConfig cfg;
  cfg.noise.gyro = Vec3(0.2, 0.1, 0.3).asDiagonal();
  cfg.noise.accel = Vec3(0.05, 0.4, 0.1).asDiagonal();
  for (int i = 0; i < 50; ++i) {
    GroupState s = state_with(rnd.element());
    s.P = random_covariance(rnd);
    const ImuSample imu{0.0, rnd.vec3(), rnd.vec3(5.0)};
    const double dt = rnd.uniform(0.001, 0.1);
    // Finite-difference linearization of the mean dynamics in right-invariant error coordinates.
    Mat9 phi_fd;
    const double h = 1e-6;
    const GroupElement base = predict(s, imu, dt, cfg).X;
    for (int k = 0; k < 9; ++k) {
      TangentVector e = TangentVector::Zero();
      e(k) = h;
      GroupState perturbed = s;
      perturbed.X = se23_exp(e) * s.X;
      const GroupElement moved = predict(perturbed, imu, dt, cfg).X;
      const Mat5 eta = (moved * inverse(base)).matrix() - Mat5::Identity();
      TangentVector col;
      col << eta(2, 1), eta(0, 2), eta(1, 0), eta.block<3, 1>(0, 3), eta.block<3, 1>(0, 4);
      phi_fd.col(k) = col / h;
    }
    EXPECT_LT((phi_fd - transition_matrix(cfg.gravity, dt)).cwiseAbs().maxCoeff(), 1e-5);

    Mat9 q = Mat9::Zero();
    q.topLeftCorner<3, 3>() = cfg.noise.gyro;
    q.block<3, 3>(3, 3) = cfg.noise.accel;
    const Mat9 ad = adjoint(s.X);
    const Mat9 expected = phi_fd * s.P * phi_fd.transpose() + phi_fd * ad * q * ad.transpose() * phi_fd.transpose() * dt;
    EXPECT_LT((predict(s, imu, dt, cfg).P - expected).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(FilterPredict, RejectsBadSteps) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  EXPECT_THROW(predict(s, still(s.X, cfg), 0.0, cfg), OrderingError);
  EXPECT_THROW(predict(s, still(s.X, cfg), -0.01, cfg), OrderingError);
  EXPECT_THROW(predict(s, still(s.X, cfg), 0.51, cfg), GapError);
  EXPECT_NO_THROW(predict(s, still(s.X, cfg), 0.5, cfg));
}

TEST(FilterPredict, RightInvariantErrorIgnoresTrajectory) {
  // eta = X_hat X^{-1} evolves the same way whatever the base state and inputs.
  Random rnd;
  FilterConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const GroupElement eta0 = se23_exp(rnd.tangent(0.5));
    const double dt = 0.01;
    std::vector<GroupElement> finals;
    for (int run = 0; run < 2; ++run) {
      GroupState truth = state_with(rnd.element(20.0));
      GroupState est = truth;
      est.X = eta0 * truth.X;
      for (int k = 0; k < 50; ++k) {
        const ImuSample imu{0.0, rnd.vec3(1.0), rnd.vec3(10.0)};
        truth = predict(truth, imu, dt, cfg);
        est = predict(est, imu, dt, cfg);
      }
      finals.push_back(est.X * inverse(truth.X));
    }
    EXPECT_LT((finals[0].matrix() - finals[1].matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(FilterDvl, IdentityExtrinsicsPassMeasurementThrough) {
  Random rnd;
  FilterConfig cfg;
  for (int i = 0; i < 100; ++i) {
    GroupState s = state_with(rnd.element());
    const DvlSample dvl{0.0, s.X.R.transpose() * s.X.v, true};
    const UpdateResult r = update_dvl(s, dvl, rnd.vec3(), cfg);
    ASSERT_EQ(r.status, UpdateStatus::applied);
    EXPECT_TRUE(r.state.X.is_approx(s.X, 1e-12));
    EXPECT_LT(r.state.P.trace(), s.P.trace());
  }
}

TEST(FilterDvl, LeverArmAndMounting) {
  FilterConfig cfg;
  cfg.dvl.rotation = so3_exp(Vec3(0, 0, kPi));
  cfg.dvl.translation = Vec3(0.5, 0, -0.2);
  GroupState s = state_with(GroupElement::identity());
  s.X.v = Vec3(1, 0.2, 0);
  const Vec3 gyro(0, 0, 0.3);
  // The DVL sees body velocity plus the lever-arm term, in its own frame.
  const Vec3 at_dvl = cfg.dvl.rotation.transpose() * (s.X.v - skew(cfg.dvl.translation) * gyro);
  const UpdateResult r = update_dvl(s, DvlSample{0.0, at_dvl, true}, gyro, cfg);
  EXPECT_TRUE(r.state.X.is_approx(s.X, 1e-12));
}

TEST(FilterDvl, ScalarGainOracle) {
  FilterConfig cfg;
  cfg.noise.dvl = 0.1 * Mat3::Identity();
  Random rnd;
  GroupState s = state_with(rnd.element());
  const UpdateResult r = update_dvl(s, DvlSample{0.0, Vec3(0.3, -0.1, 0.2), true}, Vec3::Zero(), cfg);
  const double expected = aqualoc::testing::kalman_variance(0.1, 0.1);
  EXPECT_NEAR(expected, 0.05, 1e-15);
  for (int k = 3; k < 6; ++k) EXPECT_NEAR(r.state.P(k, k), expected, 1e-12);
}

TEST(FilterDvl, VelocityPulledTowardMeasurement) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  const UpdateResult r = update_dvl(s, DvlSample{0.0, Vec3(1, 0, 0), true}, Vec3::Zero(), cfg);
  // velocity channel is a 1-D Kalman update with prior 0 and variance 0.1
  EXPECT_NEAR(r.state.X.v.x(), aqualoc::testing::kalman_mean(0, 0.1, 1.0, 0.1), 1e-12);
}

TEST(FilterDvl, InvalidIsSkipped) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  EXPECT_EQ(update_dvl(s, DvlSample{0.0, Vec3(1, 0, 0), false}, Vec3::Zero(), cfg).status, UpdateStatus::skipped_invalid);
  EXPECT_EQ(update_dvl(s, DvlSample{0.0, Vec3(NAN, 0, 0), true}, Vec3::Zero(), cfg).status, UpdateStatus::skipped_invalid);
}

TEST(FilterDvl, SingularInnovationIsSkipped) {
  FilterConfig cfg;
  cfg.noise.dvl.setZero();
  GroupState s = state_with(GroupElement::identity(), 0.0);
  EXPECT_EQ(update_dvl(s, DvlSample{0.0, Vec3(1, 0, 0), true}, Vec3::Zero(), cfg).status, UpdateStatus::skipped_singular);
}

class FilterDepth : public ::testing::TestWithParam<PositionUpdateFrame> {};

TEST_P(FilterDepth, ZeroInnovationKeepsState) {
  Random rnd;
  FilterConfig cfg;
  cfg.depth_frame = GetParam();
  for (int i = 0; i < 100; ++i) {
    GroupState s = state_with(yaw_only(rnd));
    const UpdateResult r = update_depth(s, DepthSample{0.0, -s.X.p.z()}, cfg);
    EXPECT_TRUE(r.state.X.is_approx(s.X, 1e-12));
    EXPECT_LT(r.state.P(8, 8), s.P(8, 8));
  }
}

TEST_P(FilterDepth, OneDimensionalOracle) {
  FilterConfig cfg;
  cfg.depth_frame = GetParam();
  GroupState s = state_with(GroupElement::identity());
  // one metre below the surface: z = -1
  const UpdateResult r = update_depth(s, DepthSample{0.0, 1.0}, cfg);
  const double q = cfg.noise.pseudo(2, 2);
  EXPECT_NEAR(r.state.X.p.z(), aqualoc::testing::kalman_mean(0.0, 0.1, -1.0, q), 1e-12);
  EXPECT_LE(std::abs(r.state.X.p.x()), 1e-6);
  EXPECT_LE(std::abs(r.state.X.p.y()), 1e-6);
  EXPECT_NEAR(r.state.P(8, 8), aqualoc::testing::kalman_variance(0.1, q), 1e-12);
}

TEST_P(FilterDepth, VarianceDecreases) {
  Random rnd;
  FilterConfig cfg;
  cfg.depth_frame = GetParam();
  for (int i = 0; i < 100; ++i) {
    GroupState s = state_with(yaw_only(rnd));
    s.P = random_covariance(rnd);
    const UpdateResult r = update_depth(s, DepthSample{0.0, rnd.uniform(0.0, 5.0)}, cfg);
    ASSERT_EQ(r.status, UpdateStatus::applied);
    EXPECT_LT(r.state.P(8, 8), s.P(8, 8) + (GetParam() == PositionUpdateFrame::global_right ? 0.0 : 1e-12));
    expect_healthy(r.state.P);
  }
}

INSTANTIATE_TEST_SUITE_P(Frames, FilterDepth,
                         ::testing::Values(PositionUpdateFrame::global_right, PositionUpdateFrame::vehicle_centered));

TEST(FilterDepth, HorizontalPositionHeldWithoutCrossCorrelation) {
  // Depth carries no x/y information; with the prior z error uncorrelated
  // with the rest of the state the horizontal estimate must not move.
  Random rnd;
  FilterConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    GroupState s = state_with(yaw_only(rnd));
    Vec9 d;
    for (int k = 0; k < 9; ++k) d(k) = rnd.uniform(0.01, 1.0);
    s.P = d.asDiagonal();
    const UpdateResult r = update_depth(s, DepthSample{0.0, rnd.uniform(0.0, 20.0)}, cfg);
    EXPECT_LE((r.state.X.p.head<2>() - s.X.p.head<2>()).norm(), 1e-6);
    expect_healthy(r.state.P);
  }
}

TEST(FilterDepth, VehicleCenteredHoldsHorizontalForAnyAttitude) {
  Random rnd;
  FilterConfig cfg;
  cfg.depth_frame = PositionUpdateFrame::vehicle_centered;
  for (int i = 0; i < 1000; ++i) {
    GroupState s = state_with(rnd.element());
    s.X.p.setZero();
    Vec9 d;
    for (int k = 0; k < 9; ++k) d(k) = rnd.uniform(0.01, 1.0);
    s.P = d.asDiagonal();
    const UpdateResult r = update_depth(s, DepthSample{0.0, rnd.uniform(0.0, 20.0)}, cfg);
    EXPECT_LE(r.state.X.p.head<2>().norm(), 1e-6);
  }
}

TEST(FilterDepth, NonFiniteSkipped) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  EXPECT_EQ(update_depth(s, DepthSample{0.0, NAN}, cfg).status, UpdateStatus::skipped_invalid);
}

TEST(FilterDepth, SingularSkipped) {
  FilterConfig cfg;
  cfg.noise.pseudo.setZero();
  GroupState s = state_with(GroupElement::identity(), 0.0);
  EXPECT_EQ(update_depth(s, DepthSample{0.0, 1.0}, cfg).status, UpdateStatus::skipped_singular);
}

TEST(FilterGps, FixAtEstimateKeepsState) {
  Random rnd;
  FilterConfig cfg;
  cfg.origin = geo::GeoRef(38.0, -76.4);
  GroupState s = state_with(yaw_only(rnd));
  const UpdateResult r = update_gps(s, fix_at(s.X.p.x(), s.X.p.y(), cfg), cfg);
  ASSERT_EQ(r.status, UpdateStatus::applied);
  EXPECT_TRUE(r.state.X.is_approx(s.X, 1e-6));
}

TEST(FilterGps, PulledTowardFix) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  s.X.p = Vec3(10, 0, 0);
  const UpdateResult r = update_gps(s, fix_at(0, 0, cfg, 0.0, 0.5), cfg);
  ASSERT_EQ(r.status, UpdateStatus::applied);
  EXPECT_GT(r.state.X.p.x(), 0.0);
  EXPECT_LT(r.state.X.p.x(), 10.0);
  EXPECT_NEAR(r.state.X.p.x(), aqualoc::testing::kalman_mean(10.0, 0.1, 0.0, 0.25), 1e-6);
  EXPECT_LT(r.state.P(6, 6), s.P(6, 6));
  EXPECT_LT(r.state.P(7, 7), s.P(7, 7));
  expect_healthy(r.state.P);
}

TEST(FilterGps, HorizontalCovarianceShrinks) {
  Random rnd;
  FilterConfig cfg;
  for (auto frame : {PositionUpdateFrame::global_right, PositionUpdateFrame::vehicle_centered}) {
    cfg.gps_frame = frame;
    for (int i = 0; i < 100; ++i) {
      GroupState s = state_with(yaw_only(rnd));
      s.P = random_covariance(rnd);
      const UpdateResult r = update_gps(s, fix_at(rnd.uniform(-50, 50), rnd.uniform(-50, 50), cfg), cfg);
      EXPECT_LT(r.state.P(6, 6), s.P(6, 6));
      EXPECT_LT(r.state.P(7, 7), s.P(7, 7));
      expect_healthy(r.state.P);
    }
  }
}

TEST(FilterGps, InvalidFixSkipped) {
  FilterConfig cfg;
  GroupState s = state_with(GroupElement::identity());
  GpsSample g = fix_at(1, 1, cfg);
  g.valid = false;
  EXPECT_EQ(update_gps(s, g, cfg).status, UpdateStatus::skipped_invalid);
  g = fix_at(1, 1, cfg);
  g.lat = 95.0;
  EXPECT_EQ(update_gps(s, g, cfg).status, UpdateStatus::skipped_invalid);
}

namespace {

// Random interleaving of predictions and updates; measurements are either
// near the estimate (noisy but plausible) or drawn independently of it.
void random_operations(const FilterConfig& cfg, bool plausible, std::uint64_t seed) {
  Random rnd(seed);
  for (int trial = 0; trial < 20; ++trial) {
    GroupState s = state_with(yaw_only(rnd));
    for (int k = 0; k < 500; ++k) {
      switch (static_cast<int>(rnd.uniform(0, 4))) {
        case 0: {
          const Vec3 vel = plausible ? Vec3(s.X.R.transpose() * s.X.v + rnd.vec3(0.1)) : rnd.vec3();
          s = update_dvl(s, DvlSample{0.0, vel, true}, rnd.vec3(0.1), cfg).state;
          break;
        }
        case 1: {
          const double d = plausible ? -s.X.p.z() + rnd.uniform(-0.1, 0.1) : rnd.uniform(0, 3);
          s = update_depth(s, DepthSample{0.0, d}, cfg).state;
          break;
        }
        case 2: {
          const Vec3 c = plausible ? s.X.p : Vec3::Zero();
          const double r = plausible ? 1.0 : 10.0;
          s = update_gps(s, fix_at(c.x() + rnd.uniform(-r, r), c.y() + rnd.uniform(-r, r), cfg), cfg).state;
          break;
        }
        default: {
          ImuSample imu = still(s.X, cfg);
          imu.gyro = rnd.vec3(0.2);
          imu.accel += rnd.vec3(0.5);
          s = predict(s, imu, 0.01, cfg);
        }
      }
      expect_healthy(s.P);
      if (::testing::Test::HasFailure()) return;
    }
  }
}

}  // namespace

TEST(FilterCovariance, HealthyAfterRandomOperations) {
  random_operations(FilterConfig{}, true, 11);
  FilterConfig vc;
  vc.depth_frame = PositionUpdateFrame::vehicle_centered;
  random_operations(vc, true, 12);
}

TEST(FilterCovariance, VehicleCenteredHealthyUnderConflictingMeasurements) {
  FilterConfig cfg;
  cfg.depth_frame = PositionUpdateFrame::vehicle_centered;
  random_operations(cfg, false, 13);
}

TEST(RunFilter, EmptyLogGivesEmptyTrajectory) {
  const TrajectoryEstimate t = run_filter(SensorLog{}, FilterConfig{}, FilterMode::inekf);
  EXPECT_TRUE(t.states.empty());
  EXPECT_EQ(t.filter, "inekf");
}

TEST(RunFilter, OnlyInitialFix) {
  FilterConfig cfg;
  SensorLog log;
  log.records.push_back(fix_at(0, 0, cfg, 2.0));
  const TrajectoryEstimate t = run_filter(log, cfg, FilterMode::inekf);
  ASSERT_EQ(t.states.size(), 1u);
  EXPECT_TRUE(t.states[0].X.is_approx(GroupElement::identity(), 1e-9));
  EXPECT_EQ(t.states[0].t, 2.0);
}

TEST(RunFilter, UnorderedRecordIsNamed) {
  FilterConfig cfg;
  SensorLog log;
  log.records.push_back(fix_at(0, 0, cfg, 0.0));
  log.records.push_back(ImuSample{1.0, Vec3::Zero(), -cfg.gravity});
  log.records.push_back(DepthSample{0.5, 0.1});
  try {
    run_filter(log, cfg, FilterMode::inekf);
    FAIL() << "expected OrderingError";
  } catch (const OrderingError& e) {
    EXPECT_NE(std::string(e.what()).find("record 2 (depth"), std::string::npos) << e.what();
  }
}

TEST(RunFilter, NoFixThrows) {
  SensorLog log;
  log.records.push_back(ImuSample{0.0, Vec3::Zero(), Vec3(0, 0, 9.81)});
  EXPECT_THROW(run_filter(log, FilterConfig{}, FilterMode::inekf), InitError);
}

TEST(RunFilter, OneStatePerImuSample) {
  FilterConfig cfg;
  SensorLog log;
  log.records.push_back(fix_at(0, 0, cfg, 0.0));
  for (int k = 0; k < 10; ++k) log.records.push_back(ImuSample{k * 0.01, Vec3::Zero(), -cfg.gravity});
  const TrajectoryEstimate t = run_filter(log, cfg, FilterMode::inekf);
  ASSERT_EQ(t.states.size(), 10u);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(t.states[k].t, k * 0.01, 1e-12);
}

TEST(RunFilter, SingularUpdateIsLoggedNotFatal) {
  FilterConfig cfg;
  cfg.noise.pseudo.setZero();
  cfg.noise.gyro.setZero();
  cfg.noise.accel.setZero();
  SensorLog log;
  for (int k = 0; k < 5; ++k) {
    log.records.push_back(ImuSample{k * 0.01, Vec3::Zero(), -cfg.gravity});
    log.records.push_back(DepthSample{k * 0.01, 0.0});
  }
  RunOptions opts;
  GroupState start;
  start.P.setZero();
  opts.initial = start;
  const TrajectoryEstimate t = run_filter(log, cfg, FilterMode::inekf, opts);
  EXPECT_EQ(t.states.size(), 5u);
  ASSERT_FALSE(t.events.empty());
  EXPECT_NE(t.events[0].what.find("singular"), std::string::npos);
}

TEST(RunFilter, GapAndDeadReckonSkipsUpdates) {
  FilterConfig cfg;
  SensorLog log;
  log.records.push_back(fix_at(0, 0, cfg, 0.0));
  log.records.push_back(ImuSample{0.0, Vec3::Zero(), -cfg.gravity});
  log.records.push_back(DepthSample{0.0, 5.0});
  log.records.push_back(ImuSample{0.01, Vec3::Zero(), -cfg.gravity});
  const TrajectoryEstimate dr = run_filter(log, cfg, FilterMode::deadreckon);
  EXPECT_EQ(dr.states.back().X.p.z(), 0.0);
  const TrajectoryEstimate in = run_filter(log, cfg, FilterMode::inekf);
  EXPECT_LT(in.states.back().X.p.z(), -4.0);

  log.records.push_back(ImuSample{1.0, Vec3::Zero(), -cfg.gravity});
  EXPECT_THROW(run_filter(log, cfg, FilterMode::inekf), GapError);
}

TEST(RunFilter, NoiseFreeClosure) {
  sim::ScenarioConfig sc;
  sc.duration = 100.0;
  sc.noise = sim::NoiseStd::zero();
  sc.calib.origin_lat = 38.0;
  sc.calib.origin_lon = -76.4;
  const sim::Truth truth = sim::generate_truth(sc);
  const SensorLog log = sim::sample_sensors(truth, sc);
  const FilterConfig cfg = FilterConfig::from_calibration(log.calib);
  const TrajectoryEstimate in = run_filter(log, cfg, FilterMode::inekf);
  const TrajectoryEstimate dr = run_filter(log, cfg, FilterMode::deadreckon);
  ASSERT_EQ(in.states.size(), truth.samples.size());
  ASSERT_EQ(dr.states.size(), truth.samples.size());
  double worst_truth = 0.0, worst_modes = 0.0;
  for (std::size_t i = 0; i < truth.samples.size(); ++i) {
    worst_truth = std::max(worst_truth, (in.states[i].X.p - truth.samples[i].X.p).norm());
    worst_modes = std::max(worst_modes, (in.states[i].X.p - dr.states[i].X.p).norm());
  }
  EXPECT_LE(worst_truth, 0.05);
  EXPECT_LE(worst_modes, 1e-6);
  EXPECT_TRUE(in.events.empty());
}
