#pragma once

#include <vector>

#include "neusurf/autodiff/scalar_ops.hpp"
#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// SDF-to-opacity conversion and per-ray compositing.  The scalar forms below
// are the reference semantics; the graph builders produce bit-identical
// values (same scalar ops in the same order), which the kernel-oracle tests
// rely on.

inline constexpr Real kAlphaDenominatorFloor = 1e-7;

// alpha = max((Phi_s(f_i) - Phi_s(f_next)) / max(Phi_s(f_i), eps), 0)
// with Phi_s(u) = sigmoid(s u).  Measures how much of the logistic CDF mass
// is crossed between two consecutive samples; positive only while the SDF
// decreases (entering a surface).
inline Real neus_alpha(Real f_i, Real f_next, Real s) {
  const Real phi_i = sigmoid_scalar(s * f_i);
  const Real phi_next = sigmoid_scalar(s * f_next);
  Real den = phi_i;
  if (den < kAlphaDenominatorFloor) den = kAlphaDenominatorFloor;
  const Real a = (phi_i - phi_next) / den;
  return a < 0.0 ? 0.0 : a;
}

// Graph version over a batch of rays.  `f` is 1 x (rays * samples_per_ray)
// with each ray's SDF samples contiguous in depth order; `s` is a positive
// 1x1 node.  Returns alphas, 1 x (rays * (samples_per_ray - 1)).
Tape::VarId neus_alpha_graph(Tape& tape, Tape::VarId f, Tape::VarId s,
                             int samples_per_ray);

// Per-ray compositing of sample colors into pixel colors.
//   weights: w_i = T_i alpha_i (1 x rays*(S-1))
//   rgb:     sum_i w_i c_i + background * residual transmittance (3 x rays)
// The residual uses the transmittance product directly — identical to
// 1 - sum(w) in exact arithmetic and never negative in floating point.
struct CompositeGraph {
  Tape::VarId weights = -1;
  Tape::VarId residual = -1;  // 1 x rays
  Tape::VarId rgb = -1;       // 3 x rays
};
CompositeGraph composite_graph(Tape& tape, Tape::VarId alphas, Tape::VarId colors,
                               int group, const Vec3& background);

// Scalar reference of the same compositing (weights/transmittance out
// optional).  Used by tape-free rendering and test oracles.
struct CompositePlain {
  Mat weights;       // 1 x n
  Mat transmittance; // 1 x n (T before each sample)
  Mat residual;      // 1 x rays
  Mat rgb;           // 3 x rays
};
CompositePlain composite_plain(const Mat& alphas, const Mat& colors, int group,
                               const Vec3& background);

// Photometric loss: (1/rays) * sum_r ||pred_r - gt_r||_2^2 over 3 x rays
// matrices.  Empty batches are rejected.
Tape::VarId rgb_loss_graph(Tape& tape, Tape::VarId pred, const Mat& gt);
Real rgb_loss_plain(const Mat& pred, const Mat& gt);

// -10 log10(MSE) over the masked pixels (all pixels when mask empty); images
// are 3 x (w*h) in [0,1].  Identical images return +infinity.  An empty (all
// zero) mask is rejected.
Real psnr(const Mat& pred, const Mat& gt, const std::vector<std::uint8_t>& mask = {});

}  // namespace neusurf
