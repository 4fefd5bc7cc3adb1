#include "core/skeleton.hpp"

#include <algorithm>

namespace mogen {

void Skeleton::validate() const {
  const int n = joint_count();
  require(n >= 1, "skeleton: at least one joint required");
  require(static_cast<int>(joint_names.size()) == n, "skeleton: joint_names size mismatch");
  require(static_cast<int>(offsets.size()) == n, "skeleton: offsets size mismatch");
  int roots = 0;
  for (int j = 0; j < n; ++j) {
    if (parents[j] == -1) {
      ++roots;
      require(j == root_index, "skeleton: root_index does not match the -1 parent");
    } else {
      require(parents[j] >= 0 && parents[j] < n, "skeleton: parent index out of range");
      require(parents[j] < j, "skeleton: joints must be topologically ordered (parent < child)");
    }
  }
  require(roots == 1, "skeleton: exactly one root joint required");
  for (int f : foot_joints)
    require(f >= 0 && f < n, "skeleton: foot joint index out of range");
}

int ChannelLayout::rotated_joint_count() const {
  int k = 0;
  for (int off : rotation_offset)
    if (off >= 0) ++k;
  return k;
}

std::vector<int> ChannelLayout::rotated_joints() const {
  std::vector<int> joints;
  for (int j = 0; j < static_cast<int>(rotation_offset.size()); ++j)
    if (rotation_offset[j] >= 0) joints.push_back(j);
  return joints;
}

void ChannelLayout::validate(const Skeleton& skeleton) const {
  const int n = skeleton.joint_count();
  require(static_cast<int>(rotation_offset.size()) == n,
          "layout: rotation_offset size does not match skeleton");
  require(contact_count == static_cast<int>(skeleton.foot_joints.size()),
          "layout: contact channel count does not match foot joints");
  // Slices must be disjoint and cover exactly [0, D).
  std::vector<int> owner(total_channels, -1);
  auto claim = [&](int start, int len) {
    require(start >= 0 && start + len <= total_channels, "layout: slice out of bounds");
    for (int c = start; c < start + len; ++c) {
      require(owner[c] == -1, "layout: overlapping channel slices");
      owner[c] = 1;
    }
  };
  for (int j = 0; j < n; ++j)
    if (rotation_offset[j] >= 0) claim(rotation_offset[j], 6);
  require(root_displacement_offset >= 0, "layout: missing root displacement slice");
  claim(root_displacement_offset, 3);
  if (contact_count > 0) claim(contact_offset, contact_count);
  require(std::all_of(owner.begin(), owner.end(), [](int o) { return o == 1; }),
          "layout: channel slices do not cover all columns");
}

ChannelLayout make_channel_layout(const Skeleton& skeleton, const std::vector<int>& unrotated) {
  ChannelLayout layout;
  const int n = skeleton.joint_count();
  layout.rotation_offset.assign(n, -1);
  int at = 0;
  for (int j = 0; j < n; ++j) {
    if (std::find(unrotated.begin(), unrotated.end(), j) != unrotated.end()) continue;
    layout.rotation_offset[j] = at;
    at += 6;
  }
  layout.root_displacement_offset = at;
  at += 3;
  layout.contact_offset = at;
  layout.contact_count = static_cast<int>(skeleton.foot_joints.size());
  at += layout.contact_count;
  layout.total_channels = at;
  return layout;
}

void MotionSequence::validate() const {
  require(skeleton != nullptr, "motion: missing skeleton");
  skeleton->validate();
  layout.validate(*skeleton);
  require(frames.rows() >= 1, "motion: at least one frame required");
  require(static_cast<int>(frames.cols()) == layout.total_channels,
          "motion: frame width does not match channel layout");
  require(fps > 0.0, "motion: fps must be positive");
}

Eigen::Block<const Eigen::MatrixXd> MotionSequence::rotation6d(int joint) const {
  require(joint >= 0 && joint < static_cast<int>(layout.rotation_offset.size()) &&
              layout.rotation_offset[joint] >= 0,
          "motion: joint has no rotation channels");
  return frames.block(0, layout.rotation_offset[joint], frames.rows(), 6);
}

Eigen::Block<const Eigen::MatrixXd> MotionSequence::root_displacement() const {
  return frames.block(0, layout.root_displacement_offset, frames.rows(), 3);
}

Eigen::Block<const Eigen::MatrixXd> MotionSequence::contacts() const {
  return frames.block(0, layout.contact_offset, frames.rows(), layout.contact_count);
}

}  // namespace mogen
