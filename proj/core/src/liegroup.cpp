#include "aqualoc/liegroup.hpp"

#include <cmath>

#include <Eigen/LU>

namespace aqualoc {

TangentVector make_tangent(const Vec3& xi_r, const Vec3& xi_v, const Vec3& xi_p) {
  TangentVector xi;
  xi << xi_r, xi_v, xi_p;
  return xi;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Mat3 so3_exp(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 k = skew(w);
  double a, b;
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double h = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * h * h / theta2;  // (1 - cos) / theta^2 without cancellation
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 so3_left_jacobian(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 k = skew(w);
  double b, c;
  if (theta < kSmallAngle) {
    b = 0.5 - theta2 / 24.0;
    c = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    const double h = std::sin(0.5 * theta);
    b = 2.0 * h * h / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Mat3::Identity() + b * k + c * k * k;
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  return (r.transpose() * r - Mat3::Identity()).norm() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Mat5 GroupElement::matrix() const {
  Mat5 m = Mat5::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.block<3, 1>(0, 3) = v;
  m.block<3, 1>(0, 4) = p;
  return m;
}

GroupElement GroupElement::from_matrix(const Mat5& m) {
  return {m.topLeftCorner<3, 3>(), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4)};
}

bool GroupElement::is_approx(const GroupElement& other, double tol) const {
  return (R - other.R).cwiseAbs().maxCoeff() <= tol && (v - other.v).cwiseAbs().maxCoeff() <= tol &&
         (p - other.p).cwiseAbs().maxCoeff() <= tol;
}

Mat5 wedge(const TangentVector& xi) {
  Mat5 m = Mat5::Zero();
  m.topLeftCorner<3, 3>() = skew(rot_part(xi));
  m.block<3, 1>(0, 3) = vel_part(xi);
  m.block<3, 1>(0, 4) = pos_part(xi);
  return m;
}

GroupElement se23_exp(const TangentVector& xi) {
  const Vec3 phi = rot_part(xi);
  const Mat3 jl = so3_left_jacobian(phi);
  return {so3_exp(phi), jl * vel_part(xi), jl * pos_part(xi)};
}

GroupElement inverse(const GroupElement& x) {
  const Mat3 rt = x.R.transpose();
  return {rt, -rt * x.v, -rt * x.p};
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  return {a.R * b.R, a.R * b.v + a.v, a.R * b.p + a.p};
}

AdjointMatrix adjoint(const GroupElement& x) {
  AdjointMatrix ad = AdjointMatrix::Zero();
  ad.block<3, 3>(0, 0) = x.R;
  ad.block<3, 3>(3, 0) = skew(x.v) * x.R;
  ad.block<3, 3>(3, 3) = x.R;
  ad.block<3, 3>(6, 0) = skew(x.p) * x.R;
  ad.block<3, 3>(6, 6) = x.R;
  return ad;
}

}  // namespace aqualoc
