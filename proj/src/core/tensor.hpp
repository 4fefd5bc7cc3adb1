#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "core/common.hpp"
#include "core/resample.hpp"

// Reverse-mode autodiff over Eigen matrices. Backward functions are written
// in terms of the same ops, so gradients are themselves differentiable;
// the WGAN gradient penalty needs that second-order path.
//
// Graph nodes created while recording must live inside a Tape scope.
// Tape::clear() breaks parent links iteratively, which both releases the
// closure cycles (a node's backward may capture its own output) and avoids
// deep recursive shared_ptr destruction on long graphs.

namespace mogen::ad {

using Matrix = Eigen::MatrixXd;

class Node;
using NodePtr = std::shared_ptr<Node>;

class Var {
 public:
  Var() = default;
  explicit Var(NodePtr node) : node_(std::move(node)) {}

  static Var leaf(Matrix value, bool requires_grad = false);
  static Var scalar(double value);  // 1x1 constant

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const;
  Matrix& mutable_value();  // parameters only; never call on graph interiors
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar_value() const;  // requires 1x1
  bool requires_grad() const;

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

class Node {
 public:
  Matrix value;
  std::vector<Var> parents;
  std::function<std::vector<Var>(const Var&)> backward;  // upstream grad -> per-parent grads
  bool requires_grad = false;
  std::uint64_t order = 0;  // creation index; creation order is a topological order
};

class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void clear();
  std::size_t size() const { return nodes_.size(); }

  static Tape* current();
  static void record(const NodePtr& node);

 private:
  std::vector<NodePtr> nodes_;
  Tape* prev_ = nullptr;
};

bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool saved_;
};

// --- elementwise / scalar ---
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var neg(const Var& a);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var scalar_mul(const Var& a, double c);
Var scalar_add(const Var& a, double c);
Var square(const Var& a);
Var abs(const Var& a);
Var sqrt_eps(const Var& a, double eps = 0.0);
Var sigmoid(const Var& a);
Var leaky_relu(const Var& a, double negative_slope);

// --- broadcasting (row vector 1xC, column vector Tx1) ---
Var add_rowvec(const Var& m, const Var& r);
Var mul_rowvec(const Var& m, const Var& r);
Var add_colvec(const Var& m, const Var& c);
Var mul_colvec(const Var& m, const Var& c);
Var div_colvec(const Var& m, const Var& c);
Var broadcast_rows(const Var& r, int nrows);   // 1xC -> TxC
Var broadcast_cols(const Var& c, int ncols);   // Tx1 -> TxC
Var broadcast_to(const Var& s, int nrows, int ncols);  // 1x1 -> TxC

// --- linear algebra / structure ---
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var slice_cols(const Var& a, int start, int n);
Var pad_cols(const Var& a, int start, int total);
Var concat_cols(const std::vector<Var>& parts);
Var slice_rows(const Var& a, int start, int n);
Var pad_rows(const Var& a, int start, int total);
Var concat_rows(const std::vector<Var>& parts);

// --- reductions ---
Var sum_all(const Var& a);   // -> 1x1
Var sum_rows(const Var& a);  // TxC -> 1xC
Var sum_cols(const Var& a);  // TxC -> Tx1
Var mean_all(const Var& a);  // -> 1x1

// --- temporal ---
Var im2col(const Var& a, int kernel, int pad);  // TxC -> (T+2p-k+1) x (k*C), zero padded
Var col2im(const Var& a, int kernel, int pad, int t_in, int c_in);
Var cumsum_rows(const Var& a);
Var revcumsum_rows(const Var& a);  // suffix sums; adjoint of cumsum_rows
Var row_resample(const Var& a, std::shared_ptr<const LinearResampleWeights> w,
                 bool transposed = false);

// --- batched 3x3 blocks, row-major (m00,m01,m02,m10,...,m22) per row ---
Var rowwise_mat3_mul(const Var& a, const Var& b);        // Tx9, Tx9 -> Tx9
Var rowwise_mat3_transpose(const Var& a);                // Tx9 -> Tx9
Var rowwise_mat3_vec(const Var& a, const Var& x);        // Tx9, Tx3 -> Tx3
Var rowwise_outer3(const Var& u, const Var& v);          // Tx3, Tx3 -> Tx9

// Gradients of a 1x1 output with respect to `inputs`. With create_graph the
// returned Vars stay differentiable (needed for the gradient penalty).
// Inputs not reached by the graph get zero gradients of matching shape.
std::vector<Var> gradients(const Var& output, const std::vector<Var>& inputs,
                           bool create_graph = false);

}  // namespace mogen::ad
