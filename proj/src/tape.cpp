#include "neusurf/autodiff/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "neusurf/autodiff/scalar_ops.hpp"

namespace neusurf {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(std::string("Tape: ") + msg);
}

}  // namespace

int Tape::check(VarId v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= nodes_.size())
    throw std::out_of_range("Tape: bad VarId");
  return v;
}

Tape::VarId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<VarId>(nodes_.size() - 1);
}

Mat& Tape::grad_buf(VarId v) {
  Node& n = nodes_[v];
  if (n.grad.size() == 0)
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(VarId v, const Mat& g) {
  if (!nodes_[v].needs_grad) return;
  grad_buf(v) += g;
}

// ---------------------------------------------------------------------------
// leaves

Tape::VarId Tape::input(Mat v) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(v);
  n.needs_grad = true;
  return push(std::move(n));
}

Tape::VarId Tape::constant(Mat v) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(v);
  return push(std::move(n));
}

Tape::VarId Tape::constant_scalar(Real v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

// ---------------------------------------------------------------------------
// helpers for op construction

#define NSF_BINOP_PROLOGUE(a, b)                       \
  const Mat& A = nodes_[check(a)].value;               \
  const Mat& B = nodes_[check(b)].value;               \
  Node n;                                              \
  n.args = {a, b};                                     \
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;

#define NSF_UNOP_PROLOGUE(a)                           \
  const Mat& A = nodes_[check(a)].value;               \
  Node n;                                              \
  n.args = {a};                                        \
  n.needs_grad = nodes_[a].needs_grad;

Tape::VarId Tape::matmul(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(A.cols() == B.rows(), "matmul shape mismatch");
  n.op = Op::kMatmul;
  n.value = A * B;
  return push(std::move(n));
}

Tape::VarId Tape::matmul_tn(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(A.rows() == B.rows(), "matmul_tn shape mismatch");
  n.op = Op::kMatmulTN;
  n.value = A.transpose() * B;
  return push(std::move(n));
}

Tape::VarId Tape::transpose(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kTranspose;
  n.value = A.transpose();
  return push(std::move(n));
}

Tape::VarId Tape::add(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(A.rows() == B.rows() && A.cols() == B.cols(), "add shape mismatch");
  n.op = Op::kAdd;
  n.value = A + B;
  return push(std::move(n));
}

Tape::VarId Tape::sub(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(A.rows() == B.rows() && A.cols() == B.cols(), "sub shape mismatch");
  n.op = Op::kSub;
  n.value = A - B;
  return push(std::move(n));
}

Tape::VarId Tape::mul(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(A.rows() == B.rows() && A.cols() == B.cols(), "mul shape mismatch");
  n.op = Op::kMul;
  n.value = A.cwiseProduct(B);
  return push(std::move(n));
}

Tape::VarId Tape::div(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(A.rows() == B.rows() && A.cols() == B.cols(), "div shape mismatch");
  n.op = Op::kDiv;
  n.value = A.cwiseQuotient(B);
  return push(std::move(n));
}

Tape::VarId Tape::add_colvec(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(B.cols() == 1 && A.rows() == B.rows(), "add_colvec shape mismatch");
  n.op = Op::kAddColVec;
  n.value = A.colwise() + B.col(0);
  return push(std::move(n));
}

Tape::VarId Tape::mul_colvec(VarId a, VarId b) {
  NSF_BINOP_PROLOGUE(a, b);
  require(B.cols() == 1 && A.rows() == B.rows(), "mul_colvec shape mismatch");
  n.op = Op::kMulColVec;
  n.value = A.array().colwise() * B.col(0).array();
  return push(std::move(n));
}

Tape::VarId Tape::mul_rowvec(VarId a, VarId r) {
  NSF_BINOP_PROLOGUE(a, r);
  require(B.rows() == 1 && A.cols() == B.cols(), "mul_rowvec shape mismatch");
  n.op = Op::kMulRowVec;
  n.value = A.array().rowwise() * B.row(0).array();
  return push(std::move(n));
}

Tape::VarId Tape::div_rowvec(VarId a, VarId r) {
  NSF_BINOP_PROLOGUE(a, r);
  require(B.rows() == 1 && A.cols() == B.cols(), "div_rowvec shape mismatch");
  n.op = Op::kDivRowVec;
  n.value = A.array().rowwise() / B.row(0).array();
  return push(std::move(n));
}

Tape::VarId Tape::scalar_mul(VarId s, VarId a) {
  NSF_BINOP_PROLOGUE(s, a);
  require(A.rows() == 1 && A.cols() == 1, "scalar_mul: s must be 1x1");
  n.op = Op::kScalarMul;
  n.value = A(0, 0) * B;
  return push(std::move(n));
}

Tape::VarId Tape::scale(VarId a, Real c) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kScale;
  n.c0 = c;
  n.value = c * A;
  return push(std::move(n));
}

Tape::VarId Tape::add_const(VarId a, Real c) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kAddConst;
  n.c0 = c;
  n.value = A.array() + c;
  return push(std::move(n));
}

Tape::VarId Tape::neg(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kNeg;
  n.value = -A;
  return push(std::move(n));
}

// Elementwise transcendentals use unaryExpr with scalar lambdas on purpose:
// Eigen cannot substitute vectorized approximations for an opaque functor,
// which keeps results identical to scalar recomputation in tests/oracles.
Tape::VarId Tape::sin(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kSin;
  n.value = A.unaryExpr([](Real x) { return std::sin(x); });
  return push(std::move(n));
}

Tape::VarId Tape::cos(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kCos;
  n.value = A.unaryExpr([](Real x) { return std::cos(x); });
  return push(std::move(n));
}

Tape::VarId Tape::exp(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kExp;
  n.value = A.unaryExpr([](Real x) { return std::exp(x); });
  return push(std::move(n));
}

Tape::VarId Tape::log(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kLog;
  n.value = A.unaryExpr([](Real x) { return std::log(x); });
  return push(std::move(n));
}

Tape::VarId Tape::sqrt(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kSqrt;
  n.value = A.unaryExpr([](Real x) { return std::sqrt(x); });
  return push(std::move(n));
}

Tape::VarId Tape::abs(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kAbs;
  n.value = A.unaryExpr([](Real x) { return std::abs(x); });
  return push(std::move(n));
}

Tape::VarId Tape::square(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kSquare;
  n.value = A.unaryExpr([](Real x) { return x * x; });
  return push(std::move(n));
}

Tape::VarId Tape::sigmoid(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kSigmoid;
  n.value = A.unaryExpr([](Real x) { return sigmoid_scalar(x); });
  return push(std::move(n));
}

Tape::VarId Tape::softplus(VarId a, Real beta) {
  NSF_UNOP_PROLOGUE(a);
  require(beta > 0.0, "softplus: beta must be positive");
  n.op = Op::kSoftplus;
  n.c0 = beta;
  n.value = A.unaryExpr([beta](Real x) { return softplus_scalar(x, beta); });
  return push(std::move(n));
}

Tape::VarId Tape::clamp_min(VarId a, Real c) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kClampMin;
  n.c0 = c;
  n.value = A.unaryExpr([c](Real x) { return x < c ? c : x; });
  return push(std::move(n));
}

Tape::VarId Tape::clamp_max(VarId a, Real c) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kClampMax;
  n.c0 = c;
  n.value = A.unaryExpr([c](Real x) { return x > c ? c : x; });
  return push(std::move(n));
}

Tape::VarId Tape::sum_all(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kSumAll;
  Mat s(1, 1);
  // explicit storage-order accumulation: the order is part of the op's
  // contract so straight-line test oracles can reproduce it bit-for-bit
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < A.size(); ++i) acc += A.data()[i];
  s(0, 0) = acc;
  n.value = std::move(s);
  return push(std::move(n));
}

Tape::VarId Tape::mean_all(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  require(A.size() > 0, "mean_all of empty matrix");
  n.op = Op::kMeanAll;
  Mat s(1, 1);
  Real acc = 0.0;  // storage order, same contract as sum_all
  for (Eigen::Index i = 0; i < A.size(); ++i) acc += A.data()[i];
  s(0, 0) = acc / static_cast<Real>(A.size());
  n.value = std::move(s);
  return push(std::move(n));
}

Tape::VarId Tape::colwise_norm(VarId a) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kColwiseNorm;
  n.value = A.colwise().norm();
  return push(std::move(n));
}

Tape::VarId Tape::concat_rows(const std::vector<VarId>& parts) {
  require(!parts.empty(), "concat_rows: empty list");
  Eigen::Index rows = 0;
  const Eigen::Index cols = nodes_[check(parts[0])].value.cols();
  for (VarId p : parts) {
    const Mat& v = nodes_[check(p)].value;
    require(v.cols() == cols, "concat_rows: column count mismatch");
    rows += v.rows();
  }
  Node n;
  n.op = Op::kConcatRows;
  n.args = parts;
  Mat out(rows, cols);
  Eigen::Index r = 0;
  for (VarId p : parts) {
    const Mat& v = nodes_[p].value;
    out.middleRows(r, v.rows()) = v;
    r += v.rows();
    n.needs_grad = n.needs_grad || nodes_[p].needs_grad;
  }
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::VarId Tape::slice_rows(VarId a, int row0, int nrows) {
  NSF_UNOP_PROLOGUE(a);
  require(row0 >= 0 && nrows > 0 && row0 + nrows <= A.rows(),
          "slice_rows out of range");
  n.op = Op::kSliceRows;
  n.i0 = row0;
  n.i1 = nrows;
  n.value = A.middleRows(row0, nrows);
  return push(std::move(n));
}

Tape::VarId Tape::gather_cols(VarId a, std::vector<int> idx) {
  NSF_UNOP_PROLOGUE(a);
  n.op = Op::kGatherCols;
  Mat out(A.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    require(idx[k] >= 0 && idx[k] < A.cols(), "gather_cols index out of range");
    out.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
  }
  n.idx = std::move(idx);
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::VarId Tape::group_sum_cols(VarId a, int group) {
  NSF_UNOP_PROLOGUE(a);
  require(group > 0 && A.cols() % group == 0, "group_sum_cols: bad group size");
  n.op = Op::kGroupSumCols;
  n.i0 = group;
  const Eigen::Index ngroups = A.cols() / group;
  Mat out = Mat::Zero(A.rows(), ngroups);
  // explicit left-to-right accumulation: summation order is part of the
  // op's contract (straight-line oracles replay it exactly)
  for (Eigen::Index g = 0; g < ngroups; ++g)
    for (Eigen::Index j = 0; j < group; ++j)
      out.col(g) += A.col(g * group + j);
  n.value = std::move(out);
  return push(std::move(n));
}

Tape::VarId Tape::composite_weights(VarId alpha, int group) {
  NSF_UNOP_PROLOGUE(alpha);
  require(A.rows() == 1, "composite_weights: alpha must be 1xn");
  require(group > 0 && A.cols() % group == 0, "composite_weights: bad group");
  n.op = Op::kCompositeWeights;
  n.i0 = group;
  const Eigen::Index cols = A.cols();
  Mat w(1, cols);
  Mat trans(1, cols);  // T_i before sample i, cached for the adjoint
  for (Eigen::Index start = 0; start < cols; start += group) {
    Real t = 1.0;
    Real budget_used = 0.0;
    for (Eigen::Index i = start; i < start + group; ++i) {
      trans(0, i) = t;
      Real wi = t * A(0, i);
      // Rounding guard: mathematically sum_i T_i a_i <= 1, but the floating-
      // point accumulation can overshoot by an ulp when a ray saturates
      // (opacity reaching exactly 1).  Capping against the remaining budget
      // keeps the per-ray weight sum <= 1 as a hard guarantee; the cap only
      // ever moves a weight by rounding noise, so the adjoint ignores it.
      const Real tentative = budget_used + wi;
      if (tentative > 1.0) {
        wi = 1.0 - budget_used;
        budget_used += wi;
      } else {
        budget_used = tentative;
      }
      w(0, i) = wi;
      t = t * (1.0 - A(0, i));
    }
  }
  n.aux = std::move(trans);
  n.value = std::move(w);
  return push(std::move(n));
}

Tape::VarId Tape::residual_transmittance(VarId alpha, int group) {
  NSF_UNOP_PROLOGUE(alpha);
  require(A.rows() == 1, "residual_transmittance: alpha must be 1xn");
  require(group > 0 && A.cols() % group == 0,
          "residual_transmittance: bad group");
  n.op = Op::kResidualTransmittance;
  n.i0 = group;
  const Eigen::Index ngroups = A.cols() / group;
  Mat out(1, ngroups);
  for (Eigen::Index g = 0; g < ngroups; ++g) {
    Real t = 1.0;
    for (Eigen::Index i = g * group; i < (g + 1) * group; ++i)
      t = t * (1.0 - A(0, i));
    out(0, g) = t;
  }
  n.value = std::move(out);
  return push(std::move(n));
}

#undef NSF_BINOP_PROLOGUE
#undef NSF_UNOP_PROLOGUE

// ---------------------------------------------------------------------------
// backward

void Tape::backward(VarId root) {
  check(root);
  require(!backward_done_, "backward may run only once per tape");
  require(nodes_[root].value.rows() == 1 && nodes_[root].value.cols() == 1,
          "backward root must be a scalar node");
  backward_done_ = true;
  grad_buf(root)(0, 0) = 1.0;
  for (int id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    backward_node(id);
  }
  // Untouched differentiable leaves read as zero gradients.
  for (Node& n : nodes_)
    if (n.op == Op::kInput && n.grad.size() == 0)
      n.grad = Mat::Zero(n.value.rows(), n.value.cols());
}

void Tape::backward_node(int id) {
  Node& n = nodes_[id];
  const Mat& g = n.grad;
  const auto aval = [&](int k) -> const Mat& { return nodes_[n.args[k]].value; };

  switch (n.op) {
    case Op::kInput:
    case Op::kConstant:
      break;

    case Op::kMatmul:
      accumulate(n.args[0], g * aval(1).transpose());
      accumulate(n.args[1], aval(0).transpose() * g);
      break;
    case Op::kMatmulTN:
      accumulate(n.args[0], aval(1) * g.transpose());
      accumulate(n.args[1], aval(0) * g);
      break;
    case Op::kTranspose:
      accumulate(n.args[0], g.transpose());
      break;

    case Op::kAdd:
      accumulate(n.args[0], g);
      accumulate(n.args[1], g);
      break;
    case Op::kSub:
      accumulate(n.args[0], g);
      accumulate(n.args[1], -g);
      break;
    case Op::kMul:
      accumulate(n.args[0], g.cwiseProduct(aval(1)));
      accumulate(n.args[1], g.cwiseProduct(aval(0)));
      break;
    case Op::kDiv:
      accumulate(n.args[0], g.cwiseQuotient(aval(1)));
      accumulate(n.args[1], -g.cwiseProduct(n.value).cwiseQuotient(aval(1)));
      break;

    case Op::kAddColVec:
      accumulate(n.args[0], g);
      accumulate(n.args[1], g.rowwise().sum());
      break;
    case Op::kMulColVec:
      accumulate(n.args[0], g.array().colwise() * aval(1).col(0).array());
      accumulate(n.args[1], g.cwiseProduct(aval(0)).rowwise().sum());
      break;
    case Op::kMulRowVec:
      accumulate(n.args[0], g.array().rowwise() * aval(1).row(0).array());
      accumulate(n.args[1], g.cwiseProduct(aval(0)).colwise().sum());
      break;
    case Op::kDivRowVec: {
      accumulate(n.args[0], g.array().rowwise() / aval(1).row(0).array());
      Mat gr = -(g.cwiseProduct(n.value)).colwise().sum();
      accumulate(n.args[1], gr.array().rowwise() / aval(1).row(0).array());
      break;
    }
    case Op::kScalarMul: {
      Mat gs(1, 1);
      gs(0, 0) = g.cwiseProduct(aval(1)).sum();
      accumulate(n.args[0], gs);
      accumulate(n.args[1], aval(0)(0, 0) * g);
      break;
    }

    case Op::kScale:
      accumulate(n.args[0], n.c0 * g);
      break;
    case Op::kAddConst:
      accumulate(n.args[0], g);
      break;
    case Op::kNeg:
      accumulate(n.args[0], -g);
      break;

    case Op::kSin:
      accumulate(n.args[0], g.cwiseProduct(aval(0).unaryExpr(
                                [](Real x) { return std::cos(x); })));
      break;
    case Op::kCos:
      accumulate(n.args[0], -g.cwiseProduct(aval(0).unaryExpr(
                                 [](Real x) { return std::sin(x); })));
      break;
    case Op::kExp:
      accumulate(n.args[0], g.cwiseProduct(n.value));
      break;
    case Op::kLog:
      accumulate(n.args[0], g.cwiseQuotient(aval(0)));
      break;
    case Op::kSqrt:
      accumulate(n.args[0], (g.array() / (2.0 * n.value.array())).matrix());
      break;
    case Op::kAbs:
      accumulate(n.args[0], g.cwiseProduct(aval(0).unaryExpr([](Real x) {
                   return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
                 })));
      break;
    case Op::kSquare:
      accumulate(n.args[0], 2.0 * g.cwiseProduct(aval(0)));
      break;
    case Op::kSigmoid:
      accumulate(n.args[0],
                 g.cwiseProduct(n.value.unaryExpr(
                     [](Real y) { return y * (1.0 - y); })));
      break;
    case Op::kSoftplus: {
      const Real beta = n.c0;
      accumulate(n.args[0], g.cwiseProduct(aval(0).unaryExpr([beta](Real x) {
                   return softplus_deriv_scalar(x, beta);
                 })));
      break;
    }
    case Op::kClampMin: {
      const Real c = n.c0;
      accumulate(n.args[0],
                 g.cwiseProduct(aval(0).unaryExpr(
                     [c](Real x) { return x > c ? 1.0 : 0.0; })));
      break;
    }
    case Op::kClampMax: {
      const Real c = n.c0;
      accumulate(n.args[0],
                 g.cwiseProduct(aval(0).unaryExpr(
                     [c](Real x) { return x < c ? 1.0 : 0.0; })));
      break;
    }

    case Op::kSumAll:
      accumulate(n.args[0],
                 Mat::Constant(aval(0).rows(), aval(0).cols(), g(0, 0)));
      break;
    case Op::kMeanAll:
      accumulate(n.args[0],
                 Mat::Constant(aval(0).rows(), aval(0).cols(),
                               g(0, 0) / static_cast<Real>(aval(0).size())));
      break;
    case Op::kColwiseNorm: {
      // d||a||/da = a/||a||; a zero column has zero norm and gets
      // subgradient 0 rather than NaN.
      const Mat& A = aval(0);
      Mat ga(A.rows(), A.cols());
      for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const Real norm = n.value(0, j);
        if (norm > 0.0)
          ga.col(j) = (g(0, j) / norm) * A.col(j);
        else
          ga.col(j).setZero();
      }
      accumulate(n.args[0], ga);
      break;
    }

    case Op::kConcatRows: {
      Eigen::Index r = 0;
      for (VarId p : n.args) {
        const Eigen::Index pr = nodes_[p].value.rows();
        accumulate(p, g.middleRows(r, pr));
        r += pr;
      }
      break;
    }
    case Op::kSliceRows: {
      if (nodes_[n.args[0]].needs_grad) {
        Mat& ga = grad_buf(n.args[0]);
        ga.middleRows(n.i0, n.i1) += g;
      }
      break;
    }
    case Op::kGatherCols: {
      if (nodes_[n.args[0]].needs_grad) {
        Mat& ga = grad_buf(n.args[0]);
        for (std::size_t k = 0; k < n.idx.size(); ++k)
          ga.col(n.idx[k]) += g.col(static_cast<Eigen::Index>(k));
      }
      break;
    }
    case Op::kGroupSumCols: {
      if (nodes_[n.args[0]].needs_grad) {
        Mat& ga = grad_buf(n.args[0]);
        const int group = n.i0;
        for (Eigen::Index gi = 0; gi < n.value.cols(); ++gi)
          ga.middleCols(gi * group, group).colwise() += g.col(gi);
      }
      break;
    }

    case Op::kCompositeWeights: {
      // w_i = T_i a_i with T_{i+1} = T_i (1 - a_i).  Direct adjoint:
      //   dL/da_i = T_i * (gw_i - B_i),
      //   B_i = sum_{j>i} gw_j a_j prod_{i<l<j}(1-a_l)
      // computed by the reverse recurrence B_{i-1} = gw_i a_i + (1-a_i) B_i.
      // No divisions, so a_i == 1 (full occlusion) is handled exactly.
      const Mat& A = aval(0);
      const Mat& T = n.aux;
      Mat ga(1, A.cols());
      const int group = n.i0;
      for (Eigen::Index start = 0; start < A.cols(); start += group) {
        Real b = 0.0;
        for (Eigen::Index i = start + group - 1; i >= start; --i) {
          ga(0, i) = T(0, i) * (g(0, i) - b);
          b = g(0, i) * A(0, i) + (1.0 - A(0, i)) * b;
        }
      }
      accumulate(n.args[0], ga);
      break;
    }
    case Op::kResidualTransmittance: {
      // d/da_i prod_j (1-a_j) = -prod_{j<i}(1-a_j) * prod_{j>i}(1-a_j);
      // computed with prefix/suffix products (again division-free).
      const Mat& A = aval(0);
      const int group = n.i0;
      Mat ga(1, A.cols());
      std::vector<Real> prefix(static_cast<std::size_t>(group) + 1);
      for (Eigen::Index gi = 0; gi < n.value.cols(); ++gi) {
        const Eigen::Index start = gi * group;
        prefix[0] = 1.0;
        for (int i = 0; i < group; ++i)
          prefix[i + 1] = prefix[i] * (1.0 - A(0, start + i));
        Real suffix = 1.0;
        for (int i = group - 1; i >= 0; --i) {
          ga(0, start + i) = -g(0, gi) * prefix[i] * suffix;
          suffix *= (1.0 - A(0, start + i));
        }
      }
      accumulate(n.args[0], ga);
      break;
    }
  }
}

}  // namespace neusurf
