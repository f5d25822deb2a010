#pragma once

#include <vector>

#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/types.hpp"
#include "neusurf/fields/sdf_field.hpp"

namespace neusurf {

// Projects query points onto the field's zero-level set:
//   x_q = x - f(x) * grad f(x) / ||grad f(x)||
// Points whose gradient norm is at or below this floor carry no usable
// direction and are dropped (counted, never silently kept).
inline constexpr Real kPullGradientFloor = 1e-8;

struct PullGraph {
  Tape::VarId points = -1;   // 3 x |kept|, differentiable
  std::vector<int> kept;     // surviving query columns, ascending
  Eigen::Index dropped = 0;
};

// Core graph op over already-built sdf (1 x n) and gradient (3 x n) nodes;
// `queries` holds the matching query positions (entering as constants).
// Throws when every point is dropped.
PullGraph pull_points_graph(Tape& tape, Tape::VarId sdf, Tape::VarId gradient,
                            const Mat& queries);

// Convenience: evaluates `field` at `queries` and pulls.  Gradients flow
// into the field parameters (through both f and its spatial gradient).
PullGraph pull_to_surface_graph(Tape& tape, const SdfField& field,
                                const Mat& queries);

struct PulledPoints {
  Mat points;             // 3 x |kept|
  std::vector<int> kept;  // surviving query columns, ascending
  Eigen::Index dropped = 0;
};

// Tape-free pulling from explicit sdf/gradient arrays (works with any SDF
// source, analytic ones included).
PulledPoints pull_points_plain(const Vec& sdf, const Mat& gradient,
                               const Mat& queries);

// Tape-free pulling through the field.
PulledPoints pull_to_surface_plain(const SdfField& field, const Mat& queries);

}  // namespace neusurf
