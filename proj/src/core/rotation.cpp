#include "core/rotation.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mogen {

namespace {
constexpr double kDegenerateNorm = 1e-8;
}

Eigen::Matrix3d rot6d_to_matrix(const Eigen::Matrix<double, 6, 1>& r) {
  require(r.allFinite(), "rot6d: non-finite input");
  Eigen::Vector3d a1 = r.head<3>();
  Eigen::Vector3d a2 = r.tail<3>();
  double n1 = a1.norm();
  require(n1 > kDegenerateNorm, "rot6d: degenerate rotation (first vector has zero norm)");
  Eigen::Vector3d b1 = a1 / n1;
  Eigen::Vector3d u2 = a2 - b1.dot(a2) * b1;
  double n2 = u2.norm();
  require(n2 > kDegenerateNorm, "rot6d: degenerate rotation (vectors are parallel)");
  Eigen::Vector3d b2 = u2 / n2;
  Eigen::Vector3d b3 = b1.cross(b2);
  Eigen::Matrix3d rotation;
  rotation.col(0) = b1;
  rotation.col(1) = b2;
  rotation.col(2) = b3;
  return rotation;
}

Eigen::Matrix<double, 6, 1> matrix_to_rot6d(const Eigen::Matrix3d& rotation) {
  Eigen::Matrix3d gram = rotation.transpose() * rotation;
  require((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-5,
          "matrix_to_rot6d: input is not orthonormal");
  require(rotation.determinant() > 0.0, "matrix_to_rot6d: reflection rejected (det must be +1)");
  Eigen::Matrix<double, 6, 1> r;
  r.head<3>() = rotation.col(0);
  r.tail<3>() = rotation.col(1);
  return r;
}

}  // namespace mogen
