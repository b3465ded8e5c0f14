#pragma once

#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "sweptnet/geometry.hpp"

namespace sweptnet {

using JointConfig = Eigen::VectorXd;  // radians, one entry per joint

struct Joint {
    Vec3 axis{0, 0, 1};    // unit rotation axis, parent frame
    Vec3 offset{0, 0, 0};  // fixed translation applied after the rotation, meters
    double lower = 0;      // joint limits, radians
    double upper = 0;
};

// Serial chain of revolute joints. Link i geometry is a list of capsules
// expressed in frame i, which sits after joint i's rotation and offset.
struct RobotModel {
    std::vector<Joint> joints;
    std::vector<std::vector<Capsule>> link_shapes;
    Eigen::Isometry3d base_pose = Eigen::Isometry3d::Identity();

    int dof() const { return static_cast<int>(joints.size()); }
    // Sum of joint offset lengths; upper bound on the distance from base to
    // any link frame origin.
    double reach() const;
    // Reach plus the largest capsule extent beyond its frame origin; upper
    // bound on the distance from base to any point of the robot volume.
    double max_extent() const;

    void validate() const;  // throws std::invalid_argument on a broken invariant
};

// World transform of every link frame:
//   T_i = base * prod_{j<=i} rot(axis_j, q_j) * trans(offset_j)
std::vector<Eigen::Isometry3d> forward_kinematics(const RobotModel& r, const JointConfig& q);

// All link capsules posed in the world frame, link-major order. Appends to `out`.
void pose_link_capsules(const RobotModel& r, const JointConfig& q, std::vector<Capsule>& out);

// Signed distance from x to the union of posed link capsules (min over
// members). Exact outside the union, sign-exact everywhere.
double robot_sdf(const RobotModel& r, const JointConfig& q, const Vec3& x);

bool within_limits(const RobotModel& r, const JointConfig& q, double tol = 1e-6);

// Fixed synthetic manipulator: alternating z/y axes, offsets along local z
// summing to ~1 m reach, capsule links, limits +-170deg (z) / +-120deg (y).
// Supported dof: 2..7. Limits are exactly representable in 32-bit floats so
// float-rounded samples stay within them.
RobotModel default_robot(int dof);

// Plain-text key/value robot description (see README for the grammar).
RobotModel load_robot_config(const std::string& path);
void save_robot_config(const std::string& path, const RobotModel& r);

}  // namespace sweptnet
