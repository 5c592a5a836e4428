#include "gufic/robot_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "gufic/errors.hpp"

namespace gufic {

namespace {

constexpr double kChristoffelStep = 1e-6;

// Space-frame screw of a revolute joint at home: [-w x o; w].
Twist joint_screw(const JointSpec& j) {
  Twist S;
  S.head<3>() = -j.axis.cross(j.origin);
  S.tail<3>() = j.axis;
  return S;
}

Mat6 spatial_inertia(const LinkSpec& l) {
  Mat6 G = Mat6::Zero();
  G.topLeftCorner<3, 3>() = l.mass * Mat3::Identity();
  G.bottomRightCorner<3, 3>() = l.inertia;
  return G;
}

// Link frames (at com, base-aligned at home) in base coordinates, plus the
// screw of each joint expressed in its own link frame.
struct ChainFrames {
  std::vector<Pose> link;      // T_i in base
  std::vector<Twist> screw;    // A_i in link i
};

ChainFrames chain_frames(const RobotDescription& model, const JointVector& q) {
  const int n = model.dof();
  ChainFrames out;
  out.link.reserve(n);
  out.screw.reserve(n);
  Pose prod;
  for (int i = 0; i < n; ++i) {
    const Twist S = joint_screw(model.joints[i]);
    prod = prod * exp_se3(S, q(i));
    const Pose home{Mat3::Identity(), model.links[i].com};
    out.link.push_back(prod * home);
    out.screw.push_back(adjoint(home.inverse()) * S);
  }
  return out;
}

Pose base_fk(const RobotDescription& model, const JointVector& q) {
  Pose T;
  for (int i = 0; i < model.dof(); ++i) T = T * exp_se3(joint_screw(model.joints[i]), q(i));
  return T * model.tool_home;
}

void check_size(const RobotDescription& model, const JointVector& v, const char* what) {
  if (v.size() != model.dof()) {
    std::ostringstream os;
    os << what << ": expected " << model.dof() << " entries, got " << v.size();
    throw Error(os.str());
  }
}

}  // namespace

void validate_description(const RobotDescription& model) {
  if (model.joints.empty()) throw ConfigError("robot model has no joints");
  if (model.joints.size() != model.links.size()) {
    throw ConfigError("robot model: joints and links differ in count");
  }
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    const auto& j = model.joints[i];
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw ConfigError("joints[" + std::to_string(i) + "].axis must be unit length");
    }
    if (j.armature < 0.0) {
      throw ConfigError("joints[" + std::to_string(i) + "].armature must be >= 0");
    }
    const auto& l = model.links[i];
    if (!(l.mass > 0.0)) throw ConfigError("links[" + std::to_string(i) + "].mass must be > 0");
    if ((l.inertia - l.inertia.transpose()).norm() > 1e-12) {
      throw ConfigError("links[" + std::to_string(i) + "].inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia);
    if (!(es.eigenvalues().minCoeff() > 0.0)) {
      throw ConfigError("links[" + std::to_string(i) + "].inertia must be positive definite");
    }
  }
  if (!is_rotation(model.tool_home.R)) throw ConfigError("tool rotation is not orthonormal");
  if (!is_rotation(model.base.R)) throw ConfigError("base rotation is not orthonormal");
}

RobotDescription transform_description(const RobotDescription& model, const Pose& h) {
  RobotDescription out = model;
  out.base = h * model.base;
  out.gravity = h.R * model.gravity;
  return out;
}

Pose forward_kinematics(const RobotDescription& model, const JointVector& q) {
  check_size(model, q, "forward_kinematics");
  return model.base * base_fk(model, q);
}

Eigen::MatrixXd body_jacobian(const RobotDescription& model, const JointVector& q) {
  check_size(model, q, "body_jacobian");
  const int n = model.dof();
  Eigen::MatrixXd Js(6, n);
  Pose prod;
  for (int i = 0; i < n; ++i) {
    const Twist S = joint_screw(model.joints[i]);
    Js.col(i) = adjoint(prod) * S;
    prod = prod * exp_se3(S, q(i));
  }
  const Pose T = prod * model.tool_home;
  return adjoint(T.inverse()) * Js;
}

Eigen::MatrixXd jacobian_rate(const RobotDescription& model, const JointVector& q,
                              const JointVector& qdot) {
  check_size(model, qdot, "jacobian_rate");
  const Eigen::MatrixXd Jb = body_jacobian(model, q);
  const int n = model.dof();
  Eigen::MatrixXd Jdot = Eigen::MatrixXd::Zero(6, n);
  for (int i = 0; i < n; ++i) {
    Twist tail = Twist::Zero();
    for (int j = i + 1; j < n; ++j) tail += Jb.col(j) * qdot(j);
    Jdot.col(i) = small_adjoint(Jb.col(i)) * tail;
  }
  return Jdot;
}

Eigen::VectorXd inverse_dynamics(const RobotDescription& model, const JointVector& q,
                                 const JointVector& qdot, const JointVector& qddot) {
  check_size(model, q, "inverse_dynamics");
  check_size(model, qdot, "inverse_dynamics");
  check_size(model, qddot, "inverse_dynamics");
  const int n = model.dof();
  const ChainFrames cf = chain_frames(model, q);

  // Ad of the parent (or base) frame seen from link i.
  std::vector<Mat6> Ad_parent(n);
  for (int i = 0; i < n; ++i) {
    const Pose parent = i == 0 ? Pose() : cf.link[i - 1];
    Ad_parent[i] = adjoint(cf.link[i].inverse() * parent);
  }

  std::vector<Twist> V(n), Vdot(n);
  Twist V_prev = Twist::Zero();
  Twist Vdot_prev = Twist::Zero();
  Vdot_prev.head<3>() = -(model.base.R.transpose() * model.gravity);
  for (int i = 0; i < n; ++i) {
    const Twist& A = cf.screw[i];
    V[i] = Ad_parent[i] * V_prev + A * qdot(i);
    Vdot[i] = Ad_parent[i] * Vdot_prev + small_adjoint(V[i]) * A * qdot(i) + A * qddot(i);
    V_prev = V[i];
    Vdot_prev = Vdot[i];
  }

  Eigen::VectorXd tau(n);
  Wrench F_child = Wrench::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const Mat6 G = spatial_inertia(model.links[i]);
    Wrench F = G * Vdot[i] - small_adjoint(V[i]).transpose() * (G * V[i]);
    if (i + 1 < n) F += Ad_parent[i + 1].transpose() * F_child;
    tau(i) = cf.screw[i].dot(F) + model.joints[i].armature * qddot(i);
    F_child = F;
  }
  return tau;
}

Eigen::MatrixXd mass_matrix(const RobotDescription& model, const JointVector& q) {
  check_size(model, q, "mass_matrix");
  const int n = model.dof();
  const ChainFrames cf = chain_frames(model, q);
  std::vector<Mat6> Ad_parent(n);
  for (int i = 1; i < n; ++i) Ad_parent[i] = adjoint(cf.link[i].inverse() * cf.link[i - 1]);

  std::vector<Mat6> Ic(n);
  for (int i = n - 1; i >= 0; --i) {
    Ic[i] = spatial_inertia(model.links[i]);
    if (i + 1 < n) Ic[i] += Ad_parent[i + 1].transpose() * Ic[i + 1] * Ad_parent[i + 1];
  }

  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    Wrench F = Ic[i] * cf.screw[i];
    M(i, i) = cf.screw[i].dot(F) + model.joints[i].armature;
    for (int j = i - 1; j >= 0; --j) {
      F = Ad_parent[j + 1].transpose() * F;
      M(i, j) = M(j, i) = cf.screw[j].dot(F);
    }
  }
  return M;
}

DynamicsTerms joint_space_terms(const RobotDescription& model, const JointVector& q,
                                const JointVector& qdot) {
  check_size(model, qdot, "joint_space_terms");
  const int n = model.dof();
  DynamicsTerms out;
  out.M = mass_matrix(model, q);
  out.G = inverse_dynamics(model, q, JointVector::Zero(n), JointVector::Zero(n));

  std::vector<Eigen::MatrixXd> dM(n);
  for (int k = 0; k < n; ++k) {
    JointVector qp = q, qm = q;
    qp(k) += kChristoffelStep;
    qm(k) -= kChristoffelStep;
    dM[k] = (mass_matrix(model, qp) - mass_matrix(model, qm)) / (2.0 * kChristoffelStep);
  }
  out.C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double c = 0.0;
      for (int k = 0; k < n; ++k) {
        c += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qdot(k);
      }
      out.C(i, j) = c;
    }
  }
  return out;
}

OperationalTerms operational_terms(const RobotDescription& model, const JointVector& q,
                                   const JointVector& qdot, const DynamicsTerms& joint) {
  if (model.dof() != 6) throw Error("operational_terms requires a 6-DOF model");
  OperationalTerms out;
  out.Jb = body_jacobian(model, q);
  const double sigma_min = Eigen::JacobiSVD<Mat6>(out.Jb).singularValues()(5);
  if (sigma_min < kSingularityThreshold) {
    std::ostringstream os;
    os << "body Jacobian is near singular (sigma_min = " << sigma_min << ")";
    throw NearSingular(sigma_min, os.str());
  }
  out.Jbdot = jacobian_rate(model, q, qdot);
  const Eigen::PartialPivLU<Mat6> lu(out.Jb);
  const Mat6 Jinv = lu.inverse();
  const Mat6 M = joint.M;
  const Mat6 C = joint.C;
  out.Mt = Jinv.transpose() * M * Jinv;
  out.Mt = 0.5 * (out.Mt + out.Mt.transpose()).eval();
  out.Ct = Jinv.transpose() * (C - M * Jinv * out.Jbdot) * Jinv;
  out.Gt = Jinv.transpose() * joint.G;
  return out;
}

OperationalTerms operational_terms(const RobotDescription& model, const JointVector& q,
                                   const JointVector& qdot) {
  return operational_terms(model, q, qdot, joint_space_terms(model, q, qdot));
}

JointVector forward_dynamics(const DynamicsTerms& joint, const Eigen::MatrixXd& Jb,
                             const JointVector& qdot, const JointVector& torque,
                             const Wrench& Fe) {
  const Eigen::VectorXd rhs = torque + Jb.transpose() * Fe - joint.C * qdot - joint.G;
  return joint.M.ldlt().solve(rhs);
}

JointVector forward_dynamics(const RobotDescription& model, const JointState& state,
                             const JointVector& torque, const Wrench& Fe) {
  check_size(model, torque, "forward_dynamics");
  const DynamicsTerms joint = joint_space_terms(model, state.q, state.qdot);
  return forward_dynamics(joint, body_jacobian(model, state.q), state.qdot, torque, Fe);
}

JointVector inverse_kinematics(const RobotDescription& model, const Pose& target,
                               const JointVector& seed, const IkOptions& opts) {
  check_size(model, seed, "inverse_kinematics");
  JointVector q = seed;
  const double lambda2 = opts.damping * opts.damping;
  // Work relative to the base so that moving the base and the target together
  // leaves the iteration unchanged.
  const Pose local = model.base.inverse() * target;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const Pose g = base_fk(model, q);
    if (error_function(g, local) <= opts.tolerance) return q;
    if (it == opts.max_iterations) break;
    // Body twist that moves g toward the target to first order.
    Twist err;
    err.head<3>() = g.R.transpose() * (local.p - g.p);
    const Mat3 A = g.R.transpose() * local.R;
    err.tail<3>() = 0.5 * vee3(A - A.transpose());
    const Eigen::MatrixXd J = body_jacobian(model, q);
    const Eigen::MatrixXd JJt = J * J.transpose() + lambda2 * Eigen::MatrixXd::Identity(6, 6);
    JointVector dq = J.transpose() * JJt.ldlt().solve(err);
    const double step = dq.norm();
    if (step > 0.5) dq *= 0.5 / step;
    q += dq;
    if (!q.allFinite()) break;
  }
  std::ostringstream os;
  os << "inverse kinematics did not converge in " << opts.max_iterations
     << " iterations (Psi = " << error_function(forward_kinematics(model, q), target) << ")";
  throw NoConvergence(os.str());
}

}  // namespace gufic
