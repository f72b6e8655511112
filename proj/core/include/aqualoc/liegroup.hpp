#pragma once

// SO(3) and SE_2(3) primitives.
//
// Tangent vectors of SE_2(3) are ordered (rotation, velocity, position) and
// every 9x9 matrix in the library (covariances, adjoints, Jacobians) uses the
// same block ordering.

#include <Eigen/Core>

namespace aqualoc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

// 9-vector (xi_R, xi_v, xi_p).
using TangentVector = Vec9;
using AdjointMatrix = Mat9;

// Below this rotation angle so3_exp and the left Jacobian use Taylor forms.
inline constexpr double kSmallAngle = 1e-7;

inline auto rot_part(const TangentVector& xi) { return xi.segment<3>(0); }
inline auto vel_part(const TangentVector& xi) { return xi.segment<3>(3); }
inline auto pos_part(const TangentVector& xi) { return xi.segment<3>(6); }

TangentVector make_tangent(const Vec3& xi_r, const Vec3& xi_v, const Vec3& xi_p);

Mat3 skew(const Vec3& v);

// Rodrigues' formula; exact matrix exponential of skew(w).
Mat3 so3_exp(const Vec3& w);

// Left Jacobian of SO(3): sum_k skew(w)^k / (k+1)!.
Mat3 so3_left_jacobian(const Vec3& w);

// Checks R^T R = I and det R = 1 to within `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-9);

// An element of SE_2(3):
//   [ R v p ]
//   [ 0 1 0 ]
//   [ 0 0 1 ]
struct GroupElement {
  Mat3 R = Mat3::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();

  static GroupElement identity() { return {}; }

  Mat5 matrix() const;
  static GroupElement from_matrix(const Mat5& m);

  bool is_approx(const GroupElement& other, double tol = 1e-12) const;
};

Mat5 wedge(const TangentVector& xi);

// Closed-form exponential: R = so3_exp(xi_R), v/p = J_l(xi_R) * xi_v/xi_p.
GroupElement se23_exp(const TangentVector& xi);

GroupElement inverse(const GroupElement& x);
GroupElement compose(const GroupElement& a, const GroupElement& b);

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) { return compose(a, b); }

// Ad_X, satisfying wedge(Ad_X xi) = X wedge(xi) X^{-1}.
AdjointMatrix adjoint(const GroupElement& x);

}  // namespace aqualoc
