#include "core/resample.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mogen {

std::shared_ptr<const LinearResampleWeights> LinearResampleWeights::make(int t_in, int t_out) {
  require(t_in >= 1, "resample: input length must be >= 1");
  require(t_out >= 1, "resample: output length must be >= 1");
  auto w = std::make_shared<LinearResampleWeights>();
  w->t_in = t_in;
  w->t_out = t_out;
  w->idx.resize(t_out);
  w->w0.resize(t_out);
  w->w1.resize(t_out);
  for (int r = 0; r < t_out; ++r) {
    double pos = 0.0;
    if (t_out > 1) {
      pos = static_cast<double>(static_cast<long long>(r) * (t_in - 1)) /
            static_cast<double>(t_out - 1);
    }
    int i = static_cast<int>(std::floor(pos));
    if (i > t_in - 2) i = t_in - 2;  // pos == t_in-1 lands on the last interval
    if (i < 0) i = 0;                // t_in == 1
    double frac = pos - static_cast<double>(i);
    w->idx[r] = i;
    w->w0[r] = 1.0 - frac;
    w->w1[r] = frac;
  }
  if (t_in == 1) {
    for (int r = 0; r < t_out; ++r) {
      w->idx[r] = 0;
      w->w0[r] = 1.0;
      w->w1[r] = 0.0;
    }
  }
  return w;
}

Eigen::MatrixXd LinearResampleWeights::apply(const Eigen::MatrixXd& x) const {
  require(static_cast<int>(x.rows()) == t_in, "resample: row count mismatch");
  Eigen::MatrixXd out(t_out, x.cols());
  for (int r = 0; r < t_out; ++r) {
    const int i = idx[r];
    if (i + 1 < t_in) {
      out.row(r) = w0[r] * x.row(i) + w1[r] * x.row(i + 1);
    } else {
      out.row(r) = x.row(i);
    }
  }
  return out;
}

Eigen::MatrixXd LinearResampleWeights::apply_transpose(const Eigen::MatrixXd& g) const {
  require(static_cast<int>(g.rows()) == t_out, "resample adjoint: row count mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t_in, g.cols());
  for (int r = 0; r < t_out; ++r) {
    const int i = idx[r];
    out.row(i) += w0[r] * g.row(r);
    if (i + 1 < t_in) out.row(i + 1) += w1[r] * g.row(r);
  }
  return out;
}

Eigen::MatrixXd resample_rows(const Eigen::MatrixXd& x, int target_rows) {
  return LinearResampleWeights::make(static_cast<int>(x.rows()), target_rows)->apply(x);
}

}  // namespace mogen
