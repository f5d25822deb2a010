#pragma once

#include <string>
#include <vector>

#include "neusurf/core/types.hpp"

namespace neusurf {

// Reverse-mode automatic differentiation over dense double matrices.
//
// Usage model: a Tape is built fresh for every optimization step.  Ops
// evaluate eagerly at construction, so creation order is already a valid
// topological order; backward() walks the node list once in reverse.  All
// shapes are (rows = features, cols = batch).
//
// Design notes:
//  * No in-place mutation of node values: second-order quantities (e.g. the
//    spatial gradient of a network output) are built as ordinary forward
//    nodes, so a single first-order backward pass differentiates them too.
//  * Elementwise math goes through scalar std:: calls, not vectorized
//    polynomial approximations, so independent recomputation of the same
//    formula gives bit-identical values.
//  * The per-ray compositing ops implement their adjoints with
//    product-free recurrences, so opacity values of exactly 1 are safe.
class Tape {
 public:
  using VarId = int;

  // ---- leaves -----------------------------------------------------------
  VarId input(Mat v);            // differentiable leaf
  VarId constant(Mat v);         // non-differentiable leaf
  VarId constant_scalar(Real v);

  // ---- linear algebra ----------------------------------------------------
  VarId matmul(VarId a, VarId b);      // A * B
  VarId matmul_tn(VarId a, VarId b);   // A^T * B
  VarId transpose(VarId a);

  // ---- elementwise, two operands (same shape) ----------------------------
  VarId add(VarId a, VarId b);
  VarId sub(VarId a, VarId b);
  VarId mul(VarId a, VarId b);
  VarId div(VarId a, VarId b);  // caller guarantees |b| bounded away from 0

  // ---- broadcasting ------------------------------------------------------
  VarId add_colvec(VarId a, VarId b);  // A(h,n) + b(h,1) per column
  VarId mul_colvec(VarId a, VarId b);  // A(h,n) * b(h,1) per column
  VarId mul_rowvec(VarId a, VarId r);  // A(h,n) * r(1,n) per row
  VarId div_rowvec(VarId a, VarId r);
  VarId scalar_mul(VarId s, VarId a);  // s is a 1x1 node

  // ---- elementwise, one operand ------------------------------------------
  VarId scale(VarId a, Real c);
  VarId add_const(VarId a, Real c);
  VarId neg(VarId a);
  VarId sin(VarId a);
  VarId cos(VarId a);
  VarId exp(VarId a);
  VarId log(VarId a);
  VarId sqrt(VarId a);
  VarId abs(VarId a);
  VarId square(VarId a);
  VarId sigmoid(VarId a);
  VarId softplus(VarId a, Real beta);
  VarId clamp_min(VarId a, Real c);  // gradient passes only where a > c
  VarId clamp_max(VarId a, Real c);  // gradient passes only where a < c

  // ---- reductions / shape ------------------------------------------------
  VarId sum_all(VarId a);    // 1x1
  VarId mean_all(VarId a);   // 1x1
  VarId colwise_norm(VarId a);                 // 1xn of column 2-norms
  VarId concat_rows(const std::vector<VarId>& parts);
  VarId slice_rows(VarId a, int row0, int nrows);
  VarId gather_cols(VarId a, std::vector<int> idx);  // adjoint scatter-adds
  VarId group_sum_cols(VarId a, int group);    // sums consecutive col groups

  // ---- ray compositing (groups of `group` consecutive columns = one ray) --
  // weights: w_i = alpha_i * prod_{j<i}(1 - alpha_j), alpha is 1xn in [0,1].
  VarId composite_weights(VarId alpha, int group);
  // residual transmittance per ray: prod_i (1 - alpha_i), 1 x (n/group).
  VarId residual_transmittance(VarId alpha, int group);

  // ---- execution ----------------------------------------------------------
  const Mat& value(VarId v) const { return nodes_[check(v)].value; }
  // Valid after backward(); differentiable leaves that the loss never
  // touched hold zeros.
  const Mat& grad(VarId v) const { return nodes_[check(v)].grad; }
  bool requires_grad(VarId v) const { return nodes_[check(v)].needs_grad; }
  void backward(VarId root);  // root must be 1x1; may be called once
  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    kInput, kConstant,
    kMatmul, kMatmulTN, kTranspose,
    kAdd, kSub, kMul, kDiv,
    kAddColVec, kMulColVec, kMulRowVec, kDivRowVec, kScalarMul,
    kScale, kAddConst, kNeg,
    kSin, kCos, kExp, kLog, kSqrt, kAbs, kSquare, kSigmoid, kSoftplus,
    kClampMin, kClampMax,
    kSumAll, kMeanAll, kColwiseNorm,
    kConcatRows, kSliceRows, kGatherCols, kGroupSumCols,
    kCompositeWeights, kResidualTransmittance,
  };

  struct Node {
    Op op;
    std::vector<VarId> args;
    Mat value;
    Mat grad;           // empty until touched by backward
    bool needs_grad = false;
    Real c0 = 0.0;      // scalar payload (scale factor, clamp bound, beta)
    int i0 = 0, i1 = 0; // slice offsets / group size
    std::vector<int> idx;  // gather indices
    Mat aux;            // cached intermediates (e.g. transmittance)
  };

  VarId push(Node n);
  int check(VarId v) const;
  Mat& grad_buf(VarId v);  // allocates zeros on first touch
  void accumulate(VarId v, const Mat& g);
  void backward_node(int id);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace neusurf
