#pragma once

#include <cstdint>
#include <vector>

#include "neusurf/autodiff/tape.hpp"
#include "neusurf/buffer/weight_grid.hpp"
#include "neusurf/core/types.hpp"
#include "neusurf/fields/sdf_field.hpp"

namespace neusurf {

// One-way Chamfer term: mean over columns of A of the squared Euclidean
// distance to the nearest column of B.  The `_plain` form uses the spatial
// index; `_brute` is the O(|A||B|) reference scan the index is verified
// against (both accumulate in column order, so they agree bit-for-bit).
Real chamfer_one_way_plain(const Mat& a, const Mat& b);
Real chamfer_one_way_brute(const Mat& a, const Mat& b);

// Graph forms.  Nearest-neighbor selection happens on values (the matching
// is a detached, piecewise-constant choice); gradients flow through the
// differentiable side only.
Tape::VarId chamfer_from_var_graph(Tape& tape, Tape::VarId a, const Mat& b);
Tape::VarId chamfer_to_var_graph(Tape& tape, const Mat& a, Tape::VarId b);

// Bidirectional point-cloud alignment: (d(x_q,x_t) + d(x_t,x_q)) / 2.
// x_t is supervision — only x_q receives gradients.
Tape::VarId l_cd_graph(Tape& tape, Tape::VarId x_q, const Mat& x_t);
Real l_cd_plain(const Mat& x_q, const Mat& x_t);

// The valid subset x_q' of a pulled batch: inside [-1,1]^3 and owned by a
// buffer cell that recorded hits.  Buffer values ride along detached.
struct SurfacePointSet {
  std::vector<int> indices;               // columns of x_q forming x_q'
  Vec buffer_sdf;                         // averaged SDF per selected point
  std::vector<std::int64_t> hit_counts;   // owning cell's n per selected point
  bool empty() const { return indices.empty(); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }
};
SurfacePointSet filter_valid(const Mat& x_q, const VoteGrid& grid);

// Hit-weighted mean magnitude of the buffer SDF over x_q':
// sum_i (1/n_i)|f_i| / sum_i (1/n_i).  Plain mean when all n_i agree.
Real weighted_mean_abs_sdf(const SurfacePointSet& set);

// Global consistency: | weighted_mean|f_buffer| - d(x_q', x_t) |.  The
// buffer statistic is detached; the distance differentiates into x_q.
Tape::VarId l_global_graph(Tape& tape, Tape::VarId x_q, const SurfacePointSet& set,
                           const Mat& x_t);
Real l_global_plain(const Mat& x_q, const SurfacePointSet& set, const Mat& x_t);

// Surface regularization: (1/|x_q'|) sum_i (1/n_i) |f_field(x'_q_i)| with
// the field evaluated at the pulled points, so the penalty reaches the
// parameters (through the evaluation and the pulling geometry alike).
Tape::VarId l_surf_graph(Tape& tape, const SdfField& field, Tape::VarId x_q,
                         const SurfacePointSet& set);
Real l_surf_plain(const SdfField& field, const Mat& x_q, const SurfacePointSet& set);

// Weighted assembly: l_cd + w_surf * l_surf + w_global * l_global.  Either
// optional term may be absent (pass -1) when x_q' was empty this iteration.
Tape::VarId l_geo_graph(Tape& tape, Tape::VarId l_cd, Tape::VarId l_surf,
                        Tape::VarId l_global, Real w_surf, Real w_global);

}  // namespace neusurf
