#include "neusurf/refine/pulling.hpp"

#include <cmath>
#include <stdexcept>

namespace neusurf {

namespace {

std::vector<int> keep_list(const Mat& norms, Eigen::Index n) {
  std::vector<int> kept;
  kept.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    if (norms(0, i) > kPullGradientFloor) kept.push_back(static_cast<int>(i));
  return kept;
}

Mat gather_mat(const Mat& m, const std::vector<int>& idx) {
  Mat out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
  return out;
}

}  // namespace

PullGraph pull_points_graph(Tape& tape, Tape::VarId sdf, Tape::VarId gradient,
                            const Mat& queries) {
  const Eigen::Index n = queries.cols();
  if (queries.rows() != 3)
    throw std::invalid_argument("pull_points_graph: queries must be 3 x n");
  if (tape.value(sdf).cols() != n || tape.value(gradient).cols() != n ||
      tape.value(sdf).rows() != 1 || tape.value(gradient).rows() != 3)
    throw std::invalid_argument("pull_points_graph: sdf/gradient shape mismatch");

  Tape::VarId norm = tape.colwise_norm(gradient);
  PullGraph out;
  out.kept = keep_list(tape.value(norm), n);
  out.dropped = n - static_cast<Eigen::Index>(out.kept.size());
  if (out.kept.empty())
    throw std::runtime_error("pull_points_graph: every query had a degenerate gradient");

  Tape::VarId grad_k = tape.gather_cols(gradient, out.kept);
  Tape::VarId sdf_k = tape.gather_cols(sdf, out.kept);
  Tape::VarId norm_k = tape.gather_cols(norm, out.kept);
  Tape::VarId direction = tape.div_rowvec(grad_k, norm_k);
  Tape::VarId offset = tape.mul_rowvec(direction, sdf_k);
  out.points = tape.sub(tape.constant(gather_mat(queries, out.kept)), offset);
  return out;
}

PullGraph pull_to_surface_graph(Tape& tape, const SdfField& field,
                                const Mat& queries) {
  const SdfField::GraphOut eval =
      field.eval_graph(tape, tape.constant(queries), /*want_gradient=*/true);
  return pull_points_graph(tape, eval.sdf, eval.gradient, queries);
}

PulledPoints pull_points_plain(const Vec& sdf, const Mat& gradient,
                               const Mat& queries) {
  const Eigen::Index n = queries.cols();
  if (queries.rows() != 3)
    throw std::invalid_argument("pull_points_plain: queries must be 3 x n");
  if (sdf.size() != n || gradient.cols() != n || gradient.rows() != 3)
    throw std::invalid_argument("pull_points_plain: sdf/gradient shape mismatch");

  PulledPoints out;
  std::vector<int>& kept = out.kept;
  kept.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    if (gradient.col(i).norm() > kPullGradientFloor) kept.push_back(static_cast<int>(i));
  out.dropped = n - static_cast<Eigen::Index>(kept.size());
  if (kept.empty())
    throw std::runtime_error("pull_points_plain: every query had a degenerate gradient");

  out.points.resize(3, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const int i = kept[k];
    const Vec3 g = gradient.col(i);
    out.points.col(static_cast<Eigen::Index>(k)) =
        queries.col(i) - sdf(i) * (g / g.norm());
  }
  return out;
}

PulledPoints pull_to_surface_plain(const SdfField& field, const Mat& queries) {
  Mat sdf, gradient;
  field.eval_plain(queries, &sdf, nullptr, &gradient);
  return pull_points_plain(sdf.transpose(), gradient, queries);
}

}  // namespace neusurf
