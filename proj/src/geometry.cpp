#include "gufic/geometry.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "gufic/errors.hpp"

namespace gufic {

namespace {
constexpr double kSkewTol = 1e-8;
constexpr double kSmallAngle = 1e-8;
}  // namespace

Pose Pose::from_matrix(const Mat4& T) {
  return {T.topLeftCorner<3, 3>(), T.topRightCorner<3, 1>()};
}

Mat4 Pose::matrix() const {
  Mat4 T = Mat4::Identity();
  T.topLeftCorner<3, 3>() = R;
  T.topRightCorner<3, 1>() = p;
  return T;
}

Pose Pose::orthonormalized() const { return {nearest_rotation(R), p}; }

Mat3 hat3(const Vec3& w) {
  Mat3 S;
  S << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return S;
}

Vec3 vee3(const Mat3& S) {
  if ((S + S.transpose()).norm() > kSkewTol) {
    throw NotSkew("vee3: matrix is not skew-symmetric");
  }
  const Mat3 A = 0.5 * (S - S.transpose());
  return {A(2, 1), A(0, 2), A(1, 0)};
}

Mat4 hat6(const Vec6& xi) {
  Mat4 X = Mat4::Zero();
  X.topLeftCorner<3, 3>() = hat3(xi.tail<3>());
  X.topRightCorner<3, 1>() = xi.head<3>();
  return X;
}

Vec6 vee6(const Mat4& X) {
  Vec6 xi;
  xi.head<3>() = X.topRightCorner<3, 1>();
  xi.tail<3>() = vee3(X.topLeftCorner<3, 3>());
  return xi;
}

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

Mat3 exp_so3(const Vec3& w) {
  const double th = w.norm();
  const Mat3 W = hat3(w);
  double a, b;
  if (th < kSmallAngle) {
    a = 1.0 - th * th / 6.0;
    b = 0.5 - th * th / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / (th * th);
  }
  return Mat3::Identity() + a * W + b * W * W;
}

Pose exp_se3(const Twist& xi, double dt) {
  const Vec3 v = xi.head<3>() * dt;
  const Vec3 w = xi.tail<3>() * dt;
  const double th = w.norm();
  const Mat3 W = hat3(w);
  // V = I + b W + c W^2 maps v to the translation of the screw motion.
  double b, c;
  if (th < kSmallAngle) {
    b = 0.5 - th * th / 24.0;
    c = 1.0 / 6.0 - th * th / 120.0;
  } else {
    b = (1.0 - std::cos(th)) / (th * th);
    c = (th - std::sin(th)) / (th * th * th);
  }
  const Mat3 V = Mat3::Identity() + b * W + c * W * W;
  return {exp_so3(w), V * v};
}

Mat6 adjoint(const Pose& g) {
  Mat6 Ad = Mat6::Zero();
  Ad.topLeftCorner<3, 3>() = g.R;
  Ad.topRightCorner<3, 3>() = hat3(g.p) * g.R;
  Ad.bottomRightCorner<3, 3>() = g.R;
  return Ad;
}

Mat6 small_adjoint(const Twist& xi) {
  Mat6 ad = Mat6::Zero();
  const Mat3 W = hat3(xi.tail<3>());
  ad.topLeftCorner<3, 3>() = W;
  ad.topRightCorner<3, 3>() = hat3(xi.head<3>());
  ad.bottomRightCorner<3, 3>() = W;
  return ad;
}

Wrench coadjoint_transform(const Pose& g, const Wrench& F) {
  // Block form of Ad_g^T without building the 6x6.
  Wrench out;
  out.head<3>() = g.R.transpose() * F.head<3>();
  out.tail<3>() = g.R.transpose() * (F.tail<3>() - g.p.cross(F.head<3>()));
  return out;
}

double rotation_drift(const Mat3& R) {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

Mat3 nearest_rotation(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  const Mat3 V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(2) *= -1.0;
  return U * V.transpose();
}

bool is_rotation(const Mat3& R, double tol) {
  return rotation_drift(R) <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

double error_function(const Pose& g, const Pose& gd) {
  return (Mat3::Identity() - gd.R.transpose() * g.R).trace() +
         0.5 * (g.p - gd.p).squaredNorm();
}

Vec6 gcev(const Pose& g, const Pose& gd) {
  Vec6 e;
  e.head<3>() = g.R.transpose() * (g.p - gd.p);
  const Mat3 A = gd.R.transpose() * g.R;
  e.tail<3>() = vee3(A - A.transpose());
  return e;
}

Wrench elastic_wrench(const Pose& g, const Pose& gd, const StiffnessGains& K) {
  Wrench f;
  f.head<3>() = g.R.transpose() * gd.R * K.Kp * gd.R.transpose() * (g.p - gd.p);
  const Mat3 A = K.KR * gd.R.transpose() * g.R;
  f.tail<3>() = vee3(A - A.transpose());
  return f;
}

}  // namespace gufic
