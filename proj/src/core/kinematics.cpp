#include "core/kinematics.hpp"

#include "core/rotation.hpp"

namespace mogen {

JointPositions forward_kinematics(const Skeleton& skeleton, const MotionSequence& seq) {
  seq.validate();
  require(seq.skeleton.get() == &skeleton || seq.skeleton->joint_count() == skeleton.joint_count(),
          "forward_kinematics: sequence layout does not match skeleton");
  seq.layout.validate(skeleton);

  const int t_len = seq.length();
  const int n = skeleton.joint_count();
  JointPositions out;
  out.joint_count = n;
  out.positions.resize(t_len, 3 * n);

  // Root trajectory: rest offset plus cumulative displacement.
  Eigen::Vector3d root_pos = skeleton.offsets[skeleton.root_index];
  std::vector<Eigen::Matrix3d> world(n);
  std::vector<Eigen::Vector3d> pos(n);
  const auto disp = seq.root_displacement();
  for (int t = 0; t < t_len; ++t) {
    root_pos += disp.row(t).transpose();
    for (int j = 0; j < n; ++j) {
      Eigen::Matrix3d local = Eigen::Matrix3d::Identity();
      if (seq.layout.rotation_offset[j] >= 0) {
        Eigen::Matrix<double, 6, 1> r6 =
            seq.frames.block<1, 6>(t, seq.layout.rotation_offset[j]).transpose();
        local = rot6d_to_matrix(r6);
      }
      if (j == skeleton.root_index) {
        world[j] = local;
        pos[j] = root_pos;
      } else {
        const int p = skeleton.parents[j];
        world[j] = world[p] * local;
        pos[j] = pos[p] + world[p] * skeleton.offsets[j];
      }
      out.positions.block<1, 3>(t, 3 * j) = pos[j].transpose();
    }
  }
  return out;
}

Eigen::MatrixXd joint_velocities(const JointPositions& positions, const std::vector<int>& joints) {
  const int t_len = static_cast<int>(positions.positions.rows());
  require(t_len >= 2, "joint_velocities: at least two frames required");
  Eigen::MatrixXd vel(t_len, static_cast<int>(joints.size()));
  for (std::size_t c = 0; c < joints.size(); ++c) {
    const int j = joints[c];
    require(j >= 0 && j < positions.joint_count, "joint_velocities: joint index out of range");
    auto p = positions.joint(j);
    for (int t = 1; t < t_len; ++t)
      vel(t, static_cast<int>(c)) = (p.row(t) - p.row(t - 1)).norm();
    vel(0, static_cast<int>(c)) = vel(1, static_cast<int>(c));
  }
  return vel;
}

Eigen::MatrixXd compute_contact_labels(const Eigen::MatrixXd& velocities, double eps_contact) {
  require(eps_contact > 0.0, "contact labels: eps_contact must be positive");
  return (velocities.array() < eps_contact).cast<double>();
}

}  // namespace mogen
