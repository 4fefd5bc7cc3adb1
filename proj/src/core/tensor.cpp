#include "core/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mogen::ad {

namespace {

thread_local Tape* g_tape = nullptr;
thread_local bool g_grad_enabled = true;
thread_local std::uint64_t g_order = 0;

NodePtr make_node(Matrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->order = ++g_order;
  return n;
}

bool any_requires_grad(const std::vector<Var>& parents) {
  for (const auto& p : parents)
    if (p.defined() && p.requires_grad()) return true;
  return false;
}

Var make_op(Matrix value, std::vector<Var> parents,
            std::function<std::vector<Var>(const Var&)> backward) {
  NodePtr n = make_node(std::move(value));
  if (g_grad_enabled && any_requires_grad(parents)) {
    if (g_tape == nullptr)
      throw ValidationError("autodiff: recording op outside of a Tape scope");
    n->parents = std::move(parents);
    n->backward = std::move(backward);
    n->requires_grad = true;
    Tape::record(n);
  }
  return Var(n);
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError(std::string(op) + ": shape mismatch (" +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
}

}  // namespace

Var Var::leaf(Matrix value, bool requires_grad) {
  NodePtr n = make_node(std::move(value));
  n->requires_grad = requires_grad;
  return Var(n);
}

Var Var::scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return leaf(std::move(m));
}

const Matrix& Var::value() const {
  if (!node_) throw ValidationError("autodiff: use of undefined Var");
  return node_->value;
}

Matrix& Var::mutable_value() {
  if (!node_) throw ValidationError("autodiff: use of undefined Var");
  return node_->value;
}

double Var::scalar_value() const {
  const Matrix& m = value();
  require(m.rows() == 1 && m.cols() == 1, "scalar_value: Var is not 1x1");
  return m(0, 0);
}

bool Var::requires_grad() const {
  return node_ && node_->requires_grad;
}

Tape::Tape() {
  prev_ = g_tape;
  g_tape = this;
}

Tape::~Tape() {
  clear();
  g_tape = prev_;
}

void Tape::clear() {
  // Break links in place before dropping the references: backward closures
  // may capture the node's own output, so plain destruction would both leak
  // and (for long chains) recurse deeply.
  for (auto& n : nodes_) {
    n->backward = nullptr;
    n->parents.clear();
  }
  nodes_.clear();
}

Tape* Tape::current() { return g_tape; }

void Tape::record(const NodePtr& node) {
  g_tape->nodes_.push_back(node);
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : saved_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = saved_; }

// ---------------------------------------------------------------------------
// elementwise / scalar

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  return make_op(a.value() + b.value(), {a, b},
                 [](const Var& g) { return std::vector<Var>{g, g}; });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  return make_op(a.value() - b.value(), {a, b},
                 [](const Var& g) { return std::vector<Var>{g, neg(g)}; });
}

Var neg(const Var& a) {
  return make_op(-a.value(), {a}, [](const Var& g) { return std::vector<Var>{neg(g)}; });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  return make_op(a.value().cwiseProduct(b.value()), {a, b}, [a, b](const Var& g) {
    return std::vector<Var>{mul(g, b), mul(g, a)};
  });
}

Var div(const Var& a, const Var& b) {
  check_same_shape(a, b, "div");
  Var out = make_op(a.value().cwiseQuotient(b.value()), {a, b}, nullptr);
  if (out.node()->requires_grad) {
    out.node()->backward = [a, b, out](const Var& g) {
      return std::vector<Var>{div(g, b), neg(div(mul(g, out), b))};
    };
  }
  return out;
}

Var scalar_mul(const Var& a, double c) {
  return make_op(a.value() * c, {a},
                 [c](const Var& g) { return std::vector<Var>{scalar_mul(g, c)}; });
}

Var scalar_add(const Var& a, double c) {
  return make_op(a.value().array() + c, {a},
                 [](const Var& g) { return std::vector<Var>{g}; });
}

Var square(const Var& a) { return mul(a, a); }

Var abs(const Var& a) {
  // Subgradient: sign(x), treated as constant under further differentiation.
  Matrix sign = a.value().array().sign();
  return make_op(a.value().cwiseAbs(), {a}, [sign](const Var& g) {
    return std::vector<Var>{mul(g, Var::leaf(sign))};
  });
}

Var sqrt_eps(const Var& a, double eps) {
  Var out = make_op((a.value().array() + eps).sqrt(), {a}, nullptr);
  if (out.node()->requires_grad) {
    out.node()->backward = [out](const Var& g) {
      return std::vector<Var>{div(scalar_mul(g, 0.5), out)};
    };
  }
  return out;
}

Var sigmoid(const Var& a) {
  Matrix v = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  Var out = make_op(std::move(v), {a}, nullptr);
  if (out.node()->requires_grad) {
    out.node()->backward = [out](const Var& g) {
      Var one_minus = scalar_add(neg(out), 1.0);
      return std::vector<Var>{mul(g, mul(out, one_minus))};
    };
  }
  return out;
}

Var leaky_relu(const Var& a, double negative_slope) {
  Matrix mask = (a.value().array() > 0.0).select(Matrix::Ones(a.rows(), a.cols()),
                                                 Matrix::Constant(a.rows(), a.cols(), negative_slope));
  Matrix v = a.value().cwiseProduct(mask);
  return make_op(std::move(v), {a}, [mask](const Var& g) {
    return std::vector<Var>{mul(g, Var::leaf(mask))};
  });
}

// ---------------------------------------------------------------------------
// broadcasting

Var add_rowvec(const Var& m, const Var& r) {
  require(r.rows() == 1 && r.cols() == m.cols(), "add_rowvec: expected 1xC row vector");
  Matrix v = m.value().rowwise() + r.value().row(0);
  return make_op(std::move(v), {m, r}, [](const Var& g) {
    return std::vector<Var>{g, sum_rows(g)};
  });
}

Var mul_rowvec(const Var& m, const Var& r) {
  require(r.rows() == 1 && r.cols() == m.cols(), "mul_rowvec: expected 1xC row vector");
  Matrix v = m.value().array().rowwise() * r.value().row(0).array();
  return make_op(std::move(v), {m, r}, [m, r](const Var& g) {
    return std::vector<Var>{mul_rowvec(g, r), sum_rows(mul(g, m))};
  });
}

Var add_colvec(const Var& m, const Var& c) {
  require(c.cols() == 1 && c.rows() == m.rows(), "add_colvec: expected Tx1 column vector");
  Matrix v = m.value().colwise() + c.value().col(0);
  return make_op(std::move(v), {m, c}, [](const Var& g) {
    return std::vector<Var>{g, sum_cols(g)};
  });
}

Var mul_colvec(const Var& m, const Var& c) {
  require(c.cols() == 1 && c.rows() == m.rows(), "mul_colvec: expected Tx1 column vector");
  Matrix v = m.value().array().colwise() * c.value().col(0).array();
  return make_op(std::move(v), {m, c}, [m, c](const Var& g) {
    return std::vector<Var>{mul_colvec(g, c), sum_cols(mul(g, m))};
  });
}

Var div_colvec(const Var& m, const Var& c) {
  require(c.cols() == 1 && c.rows() == m.rows(), "div_colvec: expected Tx1 column vector");
  Matrix v = m.value().array().colwise() / c.value().col(0).array();
  return make_op(std::move(v), {m, c}, [m, c](const Var& g) {
    Var dm = div_colvec(g, c);
    Var dc = neg(div(sum_cols(mul(g, m)), mul(c, c)));
    return std::vector<Var>{dm, dc};
  });
}

Var broadcast_rows(const Var& r, int nrows) {
  require(r.rows() == 1, "broadcast_rows: expected 1xC input");
  Matrix v = r.value().colwise().replicate(nrows);
  return make_op(std::move(v), {r}, [](const Var& g) {
    return std::vector<Var>{sum_rows(g)};
  });
}

Var broadcast_cols(const Var& c, int ncols) {
  require(c.cols() == 1, "broadcast_cols: expected Tx1 input");
  Matrix v = c.value().rowwise().replicate(ncols);
  return make_op(std::move(v), {c}, [](const Var& g) {
    return std::vector<Var>{sum_cols(g)};
  });
}

Var broadcast_to(const Var& s, int nrows, int ncols) {
  require(s.rows() == 1 && s.cols() == 1, "broadcast_to: expected 1x1 input");
  Matrix v = Matrix::Constant(nrows, ncols, s.value()(0, 0));
  return make_op(std::move(v), {s}, [](const Var& g) {
    return std::vector<Var>{sum_all(g)};
  });
}

// ---------------------------------------------------------------------------
// linear algebra / structure

Var matmul(const Var& a, const Var& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  return make_op(a.value() * b.value(), {a, b}, [a, b](const Var& g) {
    return std::vector<Var>{matmul(g, transpose(b)), matmul(transpose(a), g)};
  });
}

Var transpose(const Var& a) {
  return make_op(a.value().transpose(), {a},
                 [](const Var& g) { return std::vector<Var>{transpose(g)}; });
}

Var slice_cols(const Var& a, int start, int n) {
  require(start >= 0 && n >= 0 && start + n <= a.cols(), "slice_cols: range out of bounds");
  int total = static_cast<int>(a.cols());
  return make_op(a.value().middleCols(start, n), {a}, [start, total](const Var& g) {
    return std::vector<Var>{pad_cols(g, start, total)};
  });
}

Var pad_cols(const Var& a, int start, int total) {
  require(start >= 0 && start + a.cols() <= total, "pad_cols: range out of bounds");
  Matrix v = Matrix::Zero(a.rows(), total);
  v.middleCols(start, a.cols()) = a.value();
  int n = static_cast<int>(a.cols());
  return make_op(std::move(v), {a}, [start, n](const Var& g) {
    return std::vector<Var>{slice_cols(g, start, n)};
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_cols: empty input");
  Eigen::Index rows = parts[0].rows();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    require(p.rows() == rows, "concat_cols: row count mismatch");
    total += p.cols();
  }
  Matrix v(rows, total);
  std::vector<int> offsets(parts.size());
  std::vector<int> widths(parts.size());
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    offsets[i] = static_cast<int>(at);
    widths[i] = static_cast<int>(parts[i].cols());
    v.middleCols(at, parts[i].cols()) = parts[i].value();
    at += parts[i].cols();
  }
  return make_op(std::move(v), parts, [offsets, widths](const Var& g) {
    std::vector<Var> grads;
    grads.reserve(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
      grads.push_back(slice_cols(g, offsets[i], widths[i]));
    return grads;
  });
}

Var slice_rows(const Var& a, int start, int n) {
  require(start >= 0 && n >= 0 && start + n <= a.rows(), "slice_rows: range out of bounds");
  int total = static_cast<int>(a.rows());
  return make_op(a.value().middleRows(start, n), {a}, [start, total](const Var& g) {
    return std::vector<Var>{pad_rows(g, start, total)};
  });
}

Var pad_rows(const Var& a, int start, int total) {
  require(start >= 0 && start + a.rows() <= total, "pad_rows: range out of bounds");
  Matrix v = Matrix::Zero(total, a.cols());
  v.middleRows(start, a.rows()) = a.value();
  int n = static_cast<int>(a.rows());
  return make_op(std::move(v), {a}, [start, n](const Var& g) {
    return std::vector<Var>{slice_rows(g, start, n)};
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_rows: empty input");
  Eigen::Index cols = parts[0].cols();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    require(p.cols() == cols, "concat_rows: column count mismatch");
    total += p.rows();
  }
  Matrix v(total, cols);
  std::vector<int> offsets(parts.size());
  std::vector<int> heights(parts.size());
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    offsets[i] = static_cast<int>(at);
    heights[i] = static_cast<int>(parts[i].rows());
    v.middleRows(at, parts[i].rows()) = parts[i].value();
    at += parts[i].rows();
  }
  return make_op(std::move(v), parts, [offsets, heights](const Var& g) {
    std::vector<Var> grads;
    grads.reserve(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
      grads.push_back(slice_rows(g, offsets[i], heights[i]));
    return grads;
  });
}

// ---------------------------------------------------------------------------
// reductions

Var sum_all(const Var& a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  int r = static_cast<int>(a.rows()), c = static_cast<int>(a.cols());
  return make_op(std::move(v), {a}, [r, c](const Var& g) {
    return std::vector<Var>{broadcast_to(g, r, c)};
  });
}

Var sum_rows(const Var& a) {
  Matrix v = a.value().colwise().sum();
  int r = static_cast<int>(a.rows());
  return make_op(std::move(v), {a}, [r](const Var& g) {
    return std::vector<Var>{broadcast_rows(g, r)};
  });
}

Var sum_cols(const Var& a) {
  Matrix v = a.value().rowwise().sum();
  int c = static_cast<int>(a.cols());
  return make_op(std::move(v), {a}, [c](const Var& g) {
    return std::vector<Var>{broadcast_cols(g, c)};
  });
}

Var mean_all(const Var& a) {
  double n = static_cast<double>(a.rows() * a.cols());
  return scalar_mul(sum_all(a), 1.0 / n);
}

// ---------------------------------------------------------------------------
// temporal

Var im2col(const Var& a, int kernel, int pad) {
  require(kernel >= 1, "im2col: kernel must be >= 1");
  require(pad >= 0, "im2col: pad must be >= 0");
  const int t_in = static_cast<int>(a.rows());
  const int c_in = static_cast<int>(a.cols());
  const int t_out = t_in + 2 * pad - kernel + 1;
  require(t_out >= 1, "im2col: input too short for kernel");
  Matrix v = Matrix::Zero(t_out, kernel * c_in);
  for (int k = 0; k < kernel; ++k) {
    // output row r draws input row r - pad + k
    int lo = std::max(0, pad - k);
    int hi = std::min(t_out, t_in + pad - k);
    if (hi > lo)
      v.block(lo, k * c_in, hi - lo, c_in) = a.value().middleRows(lo - pad + k, hi - lo);
  }
  return make_op(std::move(v), {a}, [kernel, pad, t_in, c_in](const Var& g) {
    return std::vector<Var>{col2im(g, kernel, pad, t_in, c_in)};
  });
}

Var col2im(const Var& a, int kernel, int pad, int t_in, int c_in) {
  const int t_out = t_in + 2 * pad - kernel + 1;
  require(static_cast<int>(a.rows()) == t_out, "col2im: row count mismatch");
  require(static_cast<int>(a.cols()) == kernel * c_in, "col2im: column count mismatch");
  Matrix v = Matrix::Zero(t_in, c_in);
  for (int k = 0; k < kernel; ++k) {
    int lo = std::max(0, pad - k);
    int hi = std::min(t_out, t_in + pad - k);
    if (hi > lo)
      v.middleRows(lo - pad + k, hi - lo) += a.value().block(lo, k * c_in, hi - lo, c_in);
  }
  return make_op(std::move(v), {a}, [kernel, pad](const Var& g) {
    return std::vector<Var>{im2col(g, kernel, pad)};
  });
}

Var cumsum_rows(const Var& a) {
  Matrix v = a.value();
  for (Eigen::Index r = 1; r < v.rows(); ++r) v.row(r) += v.row(r - 1);
  return make_op(std::move(v), {a},
                 [](const Var& g) { return std::vector<Var>{revcumsum_rows(g)}; });
}

Var revcumsum_rows(const Var& a) {
  Matrix v = a.value();
  for (Eigen::Index r = v.rows() - 2; r >= 0; --r) v.row(r) += v.row(r + 1);
  return make_op(std::move(v), {a},
                 [](const Var& g) { return std::vector<Var>{cumsum_rows(g)}; });
}

Var row_resample(const Var& a, std::shared_ptr<const LinearResampleWeights> w, bool transposed) {
  Matrix v = transposed ? w->apply_transpose(a.value()) : w->apply(a.value());
  return make_op(std::move(v), {a}, [w, transposed](const Var& g) {
    return std::vector<Var>{row_resample(g, w, !transposed)};
  });
}

// ---------------------------------------------------------------------------
// batched 3x3 blocks

Var rowwise_mat3_mul(const Var& a, const Var& b) {
  require(a.cols() == 9 && b.cols() == 9 && a.rows() == b.rows(),
          "rowwise_mat3_mul: expected matching Tx9 inputs");
  const Eigen::Index t = a.rows();
  Matrix v(t, 9);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      v.col(3 * i + j) = A.col(3 * i + 0).cwiseProduct(B.col(0 + j)) +
                         A.col(3 * i + 1).cwiseProduct(B.col(3 + j)) +
                         A.col(3 * i + 2).cwiseProduct(B.col(6 + j));
    }
  return make_op(std::move(v), {a, b}, [a, b](const Var& g) {
    return std::vector<Var>{rowwise_mat3_mul(g, rowwise_mat3_transpose(b)),
                            rowwise_mat3_mul(rowwise_mat3_transpose(a), g)};
  });
}

Var rowwise_mat3_transpose(const Var& a) {
  require(a.cols() == 9, "rowwise_mat3_transpose: expected Tx9 input");
  Matrix v(a.rows(), 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v.col(3 * i + j) = a.value().col(3 * j + i);
  return make_op(std::move(v), {a}, [](const Var& g) {
    return std::vector<Var>{rowwise_mat3_transpose(g)};
  });
}

Var rowwise_mat3_vec(const Var& a, const Var& x) {
  require(a.cols() == 9 && x.cols() == 3 && a.rows() == x.rows(),
          "rowwise_mat3_vec: expected Tx9 and Tx3 inputs");
  Matrix v(a.rows(), 3);
  const Matrix& A = a.value();
  const Matrix& X = x.value();
  for (int i = 0; i < 3; ++i) {
    v.col(i) = A.col(3 * i + 0).cwiseProduct(X.col(0)) +
               A.col(3 * i + 1).cwiseProduct(X.col(1)) +
               A.col(3 * i + 2).cwiseProduct(X.col(2));
  }
  return make_op(std::move(v), {a, x}, [a, x](const Var& g) {
    return std::vector<Var>{rowwise_outer3(g, x),
                            rowwise_mat3_vec(rowwise_mat3_transpose(a), g)};
  });
}

Var rowwise_outer3(const Var& u, const Var& v_in) {
  require(u.cols() == 3 && v_in.cols() == 3 && u.rows() == v_in.rows(),
          "rowwise_outer3: expected matching Tx3 inputs");
  Matrix v(u.rows(), 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      v.col(3 * i + j) = u.value().col(i).cwiseProduct(v_in.value().col(j));
  return make_op(std::move(v), {u, v_in}, [u, v_in](const Var& g) {
    return std::vector<Var>{rowwise_mat3_vec(g, v_in),
                            rowwise_mat3_vec(rowwise_mat3_transpose(g), u)};
  });
}

// ---------------------------------------------------------------------------
// reverse pass

std::vector<Var> gradients(const Var& output, const std::vector<Var>& inputs,
                           bool create_graph) {
  require(output.defined(), "gradients: undefined output");
  require(output.rows() == 1 && output.cols() == 1, "gradients: output must be 1x1");

  auto zero_like = [](const Var& v) {
    return Var::leaf(Matrix::Zero(v.rows(), v.cols()));
  };

  std::vector<Var> result(inputs.size());
  if (!output.requires_grad()) {
    for (std::size_t i = 0; i < inputs.size(); ++i) result[i] = zero_like(inputs[i]);
    return result;
  }

  // Reachable grad-requiring subgraph; creation order is a topological order.
  std::vector<Node*> topo;
  {
    std::unordered_map<Node*, bool> seen;
    std::vector<Node*> stack{output.node().get()};
    seen[output.node().get()] = true;
    while (!stack.empty()) {
      Node* n = stack.back();
      stack.pop_back();
      topo.push_back(n);
      for (const auto& p : n->parents) {
        if (p.defined() && p.requires_grad() && !seen[p.node().get()]) {
          seen[p.node().get()] = true;
          stack.push_back(p.node().get());
        }
      }
    }
  }
  std::sort(topo.begin(), topo.end(),
            [](const Node* a, const Node* b) { return a->order > b->order; });

  std::unordered_map<Node*, Var> grads;
  grads[output.node().get()] = Var::leaf(Matrix::Ones(1, 1));

  {
    std::unique_ptr<NoGradGuard> guard;
    if (!create_graph) guard = std::make_unique<NoGradGuard>();
    for (Node* n : topo) {
      auto it = grads.find(n);
      if (it == grads.end() || !n->backward) continue;
      Var g = it->second;
      std::vector<Var> contribs = n->backward(g);
      require(contribs.size() == n->parents.size(),
              "gradients: backward arity mismatch");
      for (std::size_t i = 0; i < contribs.size(); ++i) {
        const Var& p = n->parents[i];
        if (!p.defined() || !p.requires_grad() || !contribs[i].defined()) continue;
        Node* pn = p.node().get();
        auto pit = grads.find(pn);
        if (pit == grads.end())
          grads.emplace(pn, contribs[i]);
        else
          pit->second = add(pit->second, contribs[i]);
      }
    }
  }

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto it = inputs[i].defined() ? grads.find(inputs[i].node().get()) : grads.end();
    result[i] = (it != grads.end()) ? it->second : zero_like(inputs[i]);
  }
  return result;
}

}  // namespace mogen::ad
