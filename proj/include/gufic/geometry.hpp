#pragma once

#include <Eigen/Core>

namespace gufic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat4 = Eigen::Matrix4d;

// Body velocity [v; w] and its dual [f; tau]. Both stack the linear part first.
using Twist = Vec6;
using Wrench = Vec6;

/// Rigid transform (R, p). Rotation invariants are the caller's business;
/// use orthonormalized() after long integrations.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  Pose() = default;
  Pose(const Mat3& rotation, const Vec3& position) : R(rotation), p(position) {}

  static Pose identity() { return {}; }
  static Pose from_matrix(const Mat4& T);

  Mat4 matrix() const;
  Pose inverse() const { return {R.transpose(), -R.transpose() * p}; }
  Vec3 act(const Vec3& x) const { return R * x + p; }

  /// Nearest pose whose rotation is exactly orthonormal (polar projection).
  Pose orthonormalized() const;

  Pose operator*(const Pose& o) const { return {R * o.R, R * o.p + p}; }
};

/// Translational and rotational stiffness, both expressed in the desired frame.
struct StiffnessGains {
  Mat3 Kp = Mat3::Identity();
  Mat3 KR = Mat3::Identity();

  static StiffnessGains diagonal(const Vec3& kp, const Vec3& kr) {
    return {kp.asDiagonal(), kr.asDiagonal()};
  }
};

Mat3 hat3(const Vec3& w);

/// Inverse of hat3. Throws NotSkew when ||S + S^T|| > 1e-8.
Vec3 vee3(const Mat3& S);

Mat4 hat6(const Vec6& xi);
Vec6 vee6(const Mat4& X);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// Rodrigues exponential of hat3(w).
Mat3 exp_so3(const Vec3& w);

/// Group exponential exp(hat6(xi * dt)) in closed form.
Pose exp_se3(const Twist& xi, double dt);

/// Ad_g = [[R, p^R], [0, R]].
Mat6 adjoint(const Pose& g);

/// ad_xi = [[w^, v^], [0, w^]]; ad_xi * eta is the Lie bracket [xi, eta].
Mat6 small_adjoint(const Twist& xi);

/// Ad_g^T F: pulls a wrench back through g.
Wrench coadjoint_transform(const Pose& g, const Wrench& F);

/// ||R^T R - I||_F.
double rotation_drift(const Mat3& R);

/// Polar projection onto SO(3).
Mat3 nearest_rotation(const Mat3& M);

bool is_rotation(const Mat3& R, double tol = 1e-9);

/// Psi(g, gd) = tr(I - Rd^T R) + 1/2 |p - pd|^2.
double error_function(const Pose& g, const Pose& gd);

/// e_G = [R^T (p - pd); (Rd^T R - R^T Rd)^v]. Gradient of error_function in
/// the body frame of g.
Vec6 gcev(const Pose& g, const Pose& gd);

/// f_g = [R^T Rd Kp Rd^T (p - pd); (KR Rd^T R - R^T Rd KR)^v].
Wrench elastic_wrench(const Pose& g, const Pose& gd, const StiffnessGains& K);

}  // namespace gufic
