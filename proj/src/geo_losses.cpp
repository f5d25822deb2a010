#include "neusurf/refine/geo_losses.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "neusurf/refine/kdtree.hpp"

namespace neusurf {

namespace {

void require_cloud(const Mat& m, const char* who) {
  if (m.rows() != 3) throw std::invalid_argument(std::string(who) + ": points must be 3 x n");
  if (m.cols() == 0) throw std::invalid_argument(std::string(who) + ": empty point set");
}

// nearest columns of b for every column of a, stacked side by side
Mat nearest_columns(const Mat& a, const Mat& b) {
  const KdTree3 tree(b);
  Mat out(3, a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    out.col(i) = b.col(tree.nearest(a.col(i)).first);
  return out;
}

}  // namespace

Real chamfer_one_way_plain(const Mat& a, const Mat& b) {
  require_cloud(a, "chamfer_one_way");
  require_cloud(b, "chamfer_one_way");
  const KdTree3 tree(b);
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) acc += tree.nearest(a.col(i)).second;
  return acc * (1.0 / static_cast<Real>(a.cols()));
}

Real chamfer_one_way_brute(const Mat& a, const Mat& b) {
  require_cloud(a, "chamfer_one_way");
  require_cloud(b, "chamfer_one_way");
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    Real best = std::numeric_limits<Real>::infinity();
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const Real d = (Vec3(a.col(i)) - Vec3(b.col(j))).squaredNorm();
      if (d < best) best = d;
    }
    acc += best;
  }
  return acc * (1.0 / static_cast<Real>(a.cols()));
}

Tape::VarId chamfer_from_var_graph(Tape& tape, Tape::VarId a, const Mat& b) {
  const Mat& av = tape.value(a);
  require_cloud(av, "chamfer_from_var");
  require_cloud(b, "chamfer_from_var");
  Tape::VarId diff = tape.sub(a, tape.constant(nearest_columns(av, b)));
  return tape.scale(tape.sum_all(tape.square(diff)),
                    1.0 / static_cast<Real>(av.cols()));
}

Tape::VarId chamfer_to_var_graph(Tape& tape, const Mat& a, Tape::VarId b) {
  const Mat& bv = tape.value(b);
  require_cloud(a, "chamfer_to_var");
  require_cloud(bv, "chamfer_to_var");
  const KdTree3 tree(bv);
  std::vector<int> match(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    match[static_cast<std::size_t>(i)] = tree.nearest(a.col(i)).first;
  Tape::VarId selected = tape.gather_cols(b, match);
  Tape::VarId diff = tape.sub(tape.constant(a), selected);
  return tape.scale(tape.sum_all(tape.square(diff)),
                    1.0 / static_cast<Real>(a.cols()));
}

Tape::VarId l_cd_graph(Tape& tape, Tape::VarId x_q, const Mat& x_t) {
  Tape::VarId forward = chamfer_from_var_graph(tape, x_q, x_t);
  Tape::VarId backward = chamfer_to_var_graph(tape, x_t, x_q);
  return tape.scale(tape.add(forward, backward), 0.5);
}

Real l_cd_plain(const Mat& x_q, const Mat& x_t) {
  return 0.5 * (chamfer_one_way_plain(x_q, x_t) + chamfer_one_way_plain(x_t, x_q));
}

SurfacePointSet filter_valid(const Mat& x_q, const VoteGrid& grid) {
  if (x_q.rows() != 3)
    throw std::invalid_argument("filter_valid: points must be 3 x n");
  if (grid.empty()) throw std::invalid_argument("filter_valid: empty grid");
  SurfacePointSet set;
  std::vector<Real> sdf;
  for (Eigen::Index i = 0; i < x_q.cols(); ++i) {
    const std::int64_t cell = grid.cell_of(x_q.col(i));
    if (cell < 0 || !grid.valid(static_cast<std::size_t>(cell))) continue;
    set.indices.push_back(static_cast<int>(i));
    sdf.push_back(grid.sdf_avg[static_cast<std::size_t>(cell)]);
    set.hit_counts.push_back(grid.hits[static_cast<std::size_t>(cell)]);
  }
  set.buffer_sdf.resize(static_cast<Eigen::Index>(sdf.size()));
  for (std::size_t k = 0; k < sdf.size(); ++k)
    set.buffer_sdf(static_cast<Eigen::Index>(k)) = sdf[k];
  return set;
}

Real weighted_mean_abs_sdf(const SurfacePointSet& set) {
  if (set.empty())
    throw std::invalid_argument("weighted_mean_abs_sdf: empty point set");
  Real num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    const Real inv_n = 1.0 / static_cast<Real>(set.hit_counts[static_cast<std::size_t>(i)]);
    num += inv_n * std::abs(set.buffer_sdf(i));
    den += inv_n;
  }
  return num / den;
}

Tape::VarId l_global_graph(Tape& tape, Tape::VarId x_q, const SurfacePointSet& set,
                           const Mat& x_t) {
  if (set.empty()) throw std::invalid_argument("l_global: empty valid subset");
  Tape::VarId selected = tape.gather_cols(x_q, set.indices);
  Tape::VarId distance = chamfer_from_var_graph(tape, selected, x_t);
  Tape::VarId balance = tape.constant_scalar(weighted_mean_abs_sdf(set));
  return tape.abs(tape.sub(balance, distance));
}

Real l_global_plain(const Mat& x_q, const SurfacePointSet& set, const Mat& x_t) {
  if (set.empty()) throw std::invalid_argument("l_global: empty valid subset");
  Mat selected(3, set.size());
  for (Eigen::Index k = 0; k < set.size(); ++k)
    selected.col(k) = x_q.col(set.indices[static_cast<std::size_t>(k)]);
  return std::abs(weighted_mean_abs_sdf(set) - chamfer_one_way_plain(selected, x_t));
}

Tape::VarId l_surf_graph(Tape& tape, const SdfField& field, Tape::VarId x_q,
                         const SurfacePointSet& set) {
  if (set.empty()) throw std::invalid_argument("l_surf: empty valid subset");
  Tape::VarId selected = tape.gather_cols(x_q, set.indices);
  const SdfField::GraphOut eval = field.eval_graph(tape, selected, /*want_gradient=*/false);
  Mat inv_hits(1, set.size());
  for (Eigen::Index k = 0; k < set.size(); ++k)
    inv_hits(0, k) = 1.0 / static_cast<Real>(set.hit_counts[static_cast<std::size_t>(k)]);
  Tape::VarId weighted = tape.mul(tape.abs(eval.sdf), tape.constant(inv_hits));
  return tape.scale(tape.sum_all(weighted), 1.0 / static_cast<Real>(set.size()));
}

Real l_surf_plain(const SdfField& field, const Mat& x_q, const SurfacePointSet& set) {
  if (set.empty()) throw std::invalid_argument("l_surf: empty valid subset");
  Mat selected(3, set.size());
  for (Eigen::Index k = 0; k < set.size(); ++k)
    selected.col(k) = x_q.col(set.indices[static_cast<std::size_t>(k)]);
  Mat sdf;
  field.eval_plain(selected, &sdf, nullptr, nullptr);
  // same multiply-by-inverse form and accumulation order as the graph path
  Real acc = 0.0;
  for (Eigen::Index k = 0; k < set.size(); ++k)
    acc += std::abs(sdf(0, k)) * (1.0 / static_cast<Real>(set.hit_counts[static_cast<std::size_t>(k)]));
  return acc * (1.0 / static_cast<Real>(set.size()));
}

Tape::VarId l_geo_graph(Tape& tape, Tape::VarId l_cd, Tape::VarId l_surf,
                        Tape::VarId l_global, Real w_surf, Real w_global) {
  if (!(w_surf >= 0.0) || !(w_global >= 0.0))
    throw std::invalid_argument("l_geo: weights must be >= 0");
  Tape::VarId total = l_cd;
  if (l_surf >= 0) total = tape.add(total, tape.scale(l_surf, w_surf));
  if (l_global >= 0) total = tape.add(total, tape.scale(l_global, w_global));
  return total;
}

}  // namespace neusurf
