#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace mogen {

// Joint hierarchy with rest offsets. Parents must be topologically ordered
// (parents[i] < i for every non-root joint) so forward kinematics is a
// single pass.
struct Skeleton {
  std::vector<std::string> joint_names;
  std::vector<int> parents;                 // root = -1
  std::vector<Eigen::Vector3d> offsets;     // meters, relative to parent
  std::vector<int> foot_joints;             // joints whose velocity defines contact
  int root_index = 0;

  int joint_count() const { return static_cast<int>(parents.size()); }
  void validate() const;
};

// Maps the symbolic frame content (per-joint 6D rotations, root displacement,
// contact channels) onto columns of the frame matrix.
struct ChannelLayout {
  std::vector<int> rotation_offset;  // per joint; -1 when the joint carries no rotation
  int root_displacement_offset = -1;  // 3 columns
  int contact_offset = -1;            // one column per foot joint
  int contact_count = 0;
  int total_channels = 0;

  int rotated_joint_count() const;
  std::vector<int> rotated_joints() const;
  void validate(const Skeleton& skeleton) const;
};

// Standard layout: 6D rotation block for every joint not listed in
// `unrotated`, then 3 root-displacement columns, then contact columns.
ChannelLayout make_channel_layout(const Skeleton& skeleton,
                                  const std::vector<int>& unrotated = {});

struct MotionSequence {
  Eigen::MatrixXd frames;  // T x D
  double fps = 25.0;
  ChannelLayout layout;
  std::shared_ptr<const Skeleton> skeleton;
  std::string name;
  std::string condition_id;

  int length() const { return static_cast<int>(frames.rows()); }
  int channels() const { return static_cast<int>(frames.cols()); }
  void validate() const;

  // Column-range accessors into `frames`.
  Eigen::Block<const Eigen::MatrixXd> rotation6d(int joint) const;
  Eigen::Block<const Eigen::MatrixXd> root_displacement() const;
  Eigen::Block<const Eigen::MatrixXd> contacts() const;
};

// World-space joint positions, T rows by 3*K columns (x,y,z per joint).
struct JointPositions {
  Eigen::MatrixXd positions;
  int joint_count = 0;

  Eigen::Block<const Eigen::MatrixXd> joint(int j) const {
    return positions.block(0, 3 * j, positions.rows(), 3);
  }
};

}  // namespace mogen
