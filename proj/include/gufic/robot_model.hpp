#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "gufic/geometry.hpp"

namespace gufic {

using JointVector = Eigen::VectorXd;

/// Revolute joint, described at the home configuration (q = 0) in base
/// coordinates.
struct JointSpec {
  Vec3 axis = Vec3::UnitZ();  // unit rotation axis
  Vec3 origin = Vec3::Zero();  // any point on the axis
  double armature = 0.0;       // reflected rotor inertia, kg m^2
};

/// Rigid link carried by the joint of the same index. com and inertia are
/// given at the home configuration in base coordinates; the link frame is
/// placed at the com with base-aligned axes.
struct LinkSpec {
  double mass = 1.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Identity();  // about the com
};

struct RobotDescription {
  std::string name;
  Pose base;                           // base frame in world
  Vec3 gravity{0.0, 0.0, -9.81};       // world frame, m/s^2
  std::vector<JointSpec> joints;
  std::vector<LinkSpec> links;
  Pose tool_home;                      // end-effector frame at q = 0, base coordinates

  int dof() const { return static_cast<int>(joints.size()); }
};

struct JointState {
  JointVector q;
  JointVector qdot;
};

struct DynamicsTerms {
  Eigen::MatrixXd M;
  Eigen::MatrixXd C;
  Eigen::VectorXd G;
};

struct OperationalTerms {
  Mat6 Mt;
  Mat6 Ct;
  Wrench Gt;
  Mat6 Jb;
  Mat6 Jbdot;
};

/// Throws ConfigError when joints/links disagree, masses are not positive or
/// an inertia is not symmetric positive definite.
void validate_description(const RobotDescription& model);

/// Re-expresses the whole robot in a world frame moved by h: the base moves
/// and gravity rotates with it. Everything measured in joint space is
/// unchanged.
RobotDescription transform_description(const RobotDescription& model, const Pose& h);

/// End-effector pose in world coordinates (product of exponentials).
Pose forward_kinematics(const RobotDescription& model, const JointVector& q);

/// V^b = Jb(q) qdot for the end-effector frame.
Eigen::MatrixXd body_jacobian(const RobotDescription& model, const JointVector& q);

/// d/dt Jb along qdot, from d(Jb_i)/dq_j = ad_{Jb_i} Jb_j for j > i.
Eigen::MatrixXd jacobian_rate(const RobotDescription& model, const JointVector& q,
                              const JointVector& qdot);

/// Joint torques for (q, qdot, qddot) by recursive Newton-Euler, gravity
/// included, no external wrench.
Eigen::VectorXd inverse_dynamics(const RobotDescription& model, const JointVector& q,
                                 const JointVector& qdot, const JointVector& qddot);

/// Joint-space inertia by the composite-rigid-body algorithm.
Eigen::MatrixXd mass_matrix(const RobotDescription& model, const JointVector& q);

/// M (CRBA), C (Christoffel symbols of M, central differences with step 1e-6)
/// and G (RNEA at rest).
DynamicsTerms joint_space_terms(const RobotDescription& model, const JointVector& q,
                                const JointVector& qdot);

inline constexpr double kSingularityThreshold = 1e-4;

/// End-effector body-frame dynamics. Requires a 6-DOF model and throws
/// NearSingular when sigma_min(Jb) < kSingularityThreshold.
OperationalTerms operational_terms(const RobotDescription& model, const JointVector& q,
                                   const JointVector& qdot, const DynamicsTerms& joint);
OperationalTerms operational_terms(const RobotDescription& model, const JointVector& q,
                                   const JointVector& qdot);

/// Solves M qddot = T + Jb^T Fe - C qdot - G.
JointVector forward_dynamics(const RobotDescription& model, const JointState& state,
                             const JointVector& torque, const Wrench& Fe);
JointVector forward_dynamics(const DynamicsTerms& joint, const Eigen::MatrixXd& Jb,
                             const JointVector& qdot, const JointVector& torque,
                             const Wrench& Fe);

struct IkOptions {
  int max_iterations = 500;
  double tolerance = 1e-12;  // on error_function
  double damping = 1e-3;
};

/// Damped least squares on the body-frame pose error. Throws NoConvergence.
JointVector inverse_kinematics(const RobotDescription& model, const Pose& target,
                               const JointVector& seed, const IkOptions& opts = {});

/// Loads and validates a robot model file (see docs/schema.md). Requires
/// exactly six joints. Errors carry the file line of the offending field.
RobotDescription load_robot_description(const std::string& path);

}  // namespace gufic
