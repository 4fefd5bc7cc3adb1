#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace mogen {

// Linear interpolation over rows at uniformly spaced sample positions.
// Endpoints map exactly onto endpoints, so constant and affine-in-time
// signals survive resampling unchanged. The weights double as the adjoint
// operator needed by the autodiff engine.
struct LinearResampleWeights {
  int t_in = 0;
  int t_out = 0;
  std::vector<int> idx;      // left source row per output row
  std::vector<double> w0;    // weight of idx
  std::vector<double> w1;    // weight of idx + 1

  static std::shared_ptr<const LinearResampleWeights> make(int t_in, int t_out);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;            // t_in -> t_out rows
  Eigen::MatrixXd apply_transpose(const Eigen::MatrixXd& g) const;  // t_out -> t_in rows
};

// Convenience wrapper: resample a matrix to target_rows rows.
Eigen::MatrixXd resample_rows(const Eigen::MatrixXd& x, int target_rows);

}  // namespace mogen
