#pragma once

#include <functional>

#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/types.hpp"
#include "neusurf/fields/sdf_field.hpp"

namespace neusurf {

// Unit-gradient regularizer: (1/N) sum_i (||g_i||_2 - 1)^2 over gradient
// columns.  Rejects empty batches.
Tape::VarId eikonal_loss_graph(Tape& tape, Tape::VarId gradients);
Real eikonal_loss_plain(const Mat& gradients);

// Smoothness regularizer: (1/N) sum_i |lap_i| where the Laplacian is
// approximated by central finite differences of the analytic gradient,
//   lap(x) = sum_a (g_a(x + h e_a) - g_a(x - h e_a)) / (2h).
// Second-order autodiff is avoided on purpose: differencing the exact
// first-order gradient keeps the cost at six extra gradient batches.
Real curvature_loss_plain(const std::function<Mat(const Mat&)>& gradient_fn,
                          const Mat& points, Real fd_step);
Real curvature_loss_plain(const SdfField& field, const Mat& points, Real fd_step);

// Differentiable version for training: the six displaced gradient batches
// are built as graph nodes of `field`, so the loss reaches the parameters.
Tape::VarId curvature_loss_graph(Tape& tape, const SdfField& field,
                                 const Mat& points, Real fd_step);

}  // namespace neusurf
