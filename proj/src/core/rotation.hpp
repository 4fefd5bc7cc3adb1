#pragma once

#include <Eigen/Dense>

namespace mogen {

// 6D rotation representation: the first two columns of a rotation matrix,
// recovered via Gram-Schmidt. Continuous under interpolation, which is why
// the networks operate on it directly.
//
// Layout of the 6-vector: (a1x, a1y, a1z, a2x, a2y, a2z) where a1 and a2
// reconstruct the first and second matrix columns.

// Throws ValidationError for degenerate input (zero or parallel vectors).
Eigen::Matrix3d rot6d_to_matrix(const Eigen::Matrix<double, 6, 1>& r);

// Throws ValidationError when R is not orthonormal with det +1 (tolerance 1e-5).
Eigen::Matrix<double, 6, 1> matrix_to_rot6d(const Eigen::Matrix3d& rotation);

}  // namespace mogen
