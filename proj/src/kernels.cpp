#include "neusurf/render/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace neusurf {

Tape::VarId neus_alpha_graph(Tape& tape, Tape::VarId f, Tape::VarId s,
                             int samples_per_ray) {
  const Eigen::Index n = tape.value(f).cols();
  if (samples_per_ray < 2 || n % samples_per_ray != 0)
    throw std::invalid_argument("neus_alpha_graph: bad samples_per_ray");
  if (!(tape.value(s)(0, 0) > 0.0))
    throw std::invalid_argument("neus_alpha_graph: s must be positive");

  Tape::VarId phi = tape.sigmoid(tape.scalar_mul(s, f));
  std::vector<int> heads, tails;
  heads.reserve(static_cast<std::size_t>(n));
  tails.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((i + 1) % samples_per_ray != 0) heads.push_back(static_cast<int>(i));
    if (i % samples_per_ray != 0) tails.push_back(static_cast<int>(i));
  }
  Tape::VarId phi_head = tape.gather_cols(phi, heads);
  Tape::VarId phi_next = tape.gather_cols(phi, tails);
  Tape::VarId num = tape.sub(phi_head, phi_next);
  Tape::VarId den = tape.clamp_min(phi_head, kAlphaDenominatorFloor);
  return tape.clamp_min(tape.div(num, den), 0.0);
}

CompositeGraph composite_graph(Tape& tape, Tape::VarId alphas, Tape::VarId colors,
                               int group, const Vec3& background) {
  const Eigen::Index n = tape.value(alphas).cols();
  if (tape.value(colors).rows() != 3 || tape.value(colors).cols() != n)
    throw std::invalid_argument("composite_graph: colors must be 3 x n_alphas");
  CompositeGraph out;
  out.weights = tape.composite_weights(alphas, group);
  out.residual = tape.residual_transmittance(alphas, group);
  Tape::VarId weighted = tape.mul_rowvec(colors, out.weights);
  Tape::VarId fg = tape.group_sum_cols(weighted, group);
  Mat bg(3, 1);
  bg << background.x(), background.y(), background.z();
  Tape::VarId bg_term = tape.matmul(tape.constant(bg), out.residual);
  out.rgb = tape.add(fg, bg_term);
  return out;
}

CompositePlain composite_plain(const Mat& alphas, const Mat& colors, int group,
                               const Vec3& background) {
  if (alphas.rows() != 1 || group <= 0 || alphas.cols() % group != 0)
    throw std::invalid_argument("composite_plain: bad alpha layout");
  if (colors.rows() != 3 || colors.cols() != alphas.cols())
    throw std::invalid_argument("composite_plain: colors must be 3 x n_alphas");
  const Eigen::Index n = alphas.cols();
  const Eigen::Index rays = n / group;

  CompositePlain out;
  out.weights.resize(1, n);
  out.transmittance.resize(1, n);
  out.residual.resize(1, rays);
  out.rgb = Mat::Zero(3, rays);
  for (Eigen::Index r = 0; r < rays; ++r) {
    Real t = 1.0;
    Real budget_used = 0.0;
    for (Eigen::Index i = r * group; i < (r + 1) * group; ++i) {
      out.transmittance(0, i) = t;
      Real wi = t * alphas(0, i);
      const Real tentative = budget_used + wi;  // same guard as the graph op
      if (tentative > 1.0) {
        wi = 1.0 - budget_used;
        budget_used += wi;
      } else {
        budget_used = tentative;
      }
      out.weights(0, i) = wi;
      t = t * (1.0 - alphas(0, i));
      out.rgb.col(r) += wi * colors.col(i);
    }
    out.residual(0, r) = t;
    out.rgb.col(r) += out.residual(0, r) * background;
  }
  return out;
}

Tape::VarId rgb_loss_graph(Tape& tape, Tape::VarId pred, const Mat& gt) {
  const Mat& p = tape.value(pred);
  if (p.cols() == 0) throw std::invalid_argument("rgb_loss: empty batch");
  if (p.rows() != 3 || gt.rows() != 3 || gt.cols() != p.cols())
    throw std::invalid_argument("rgb_loss: shape mismatch");
  Tape::VarId diff = tape.sub(pred, tape.constant(gt));
  return tape.scale(tape.sum_all(tape.square(diff)),
                    1.0 / static_cast<Real>(p.cols()));
}

Real rgb_loss_plain(const Mat& pred, const Mat& gt) {
  if (pred.cols() == 0) throw std::invalid_argument("rgb_loss: empty batch");
  if (pred.rows() != 3 || gt.rows() != 3 || gt.cols() != pred.cols())
    throw std::invalid_argument("rgb_loss: shape mismatch");
  // same scalar ops in the same order as the graph build (sub, square,
  // storage-order sum, scale) so the two stay bit-identical
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const Real d = pred.data()[i] - gt.data()[i];
    acc += d * d;
  }
  return acc * (1.0 / static_cast<Real>(pred.cols()));
}

Real psnr(const Mat& pred, const Mat& gt, const std::vector<std::uint8_t>& mask) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw std::invalid_argument("psnr: dimension mismatch");
  if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != pred.cols())
    throw std::invalid_argument("psnr: mask size mismatch");
  Real acc = 0.0;
  Eigen::Index counted = 0;
  for (Eigen::Index j = 0; j < pred.cols(); ++j) {
    if (!mask.empty() && !mask[static_cast<std::size_t>(j)]) continue;
    acc += (pred.col(j) - gt.col(j)).squaredNorm();
    counted += pred.rows();
  }
  if (counted == 0) throw std::invalid_argument("psnr: empty mask");
  const Real mse = acc / static_cast<Real>(counted);
  if (mse == 0.0) return std::numeric_limits<Real>::infinity();
  return -10.0 * std::log10(mse);
}

}  // namespace neusurf
