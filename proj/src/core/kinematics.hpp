#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/skeleton.hpp"

namespace mogen {

// Rigid forward kinematics over the joint tree. Root translation is the
// running sum of the per-frame root displacement deltas (frame t includes
// its own delta) plus the root rest offset; joints without rotation
// channels use the identity local rotation.
JointPositions forward_kinematics(const Skeleton& skeleton, const MotionSequence& seq);

// Per-frame velocity magnitudes (meters/frame) for the selected joints.
// v[0] replicates v[1]; requires T >= 2.
Eigen::MatrixXd joint_velocities(const JointPositions& positions, const std::vector<int>& joints);

// Binary contact labels: 1 iff velocity < eps_contact (strict).
Eigen::MatrixXd compute_contact_labels(const Eigen::MatrixXd& velocities, double eps_contact);

}  // namespace mogen
