#include "neusurf/fields/field_losses.hpp"

#include <stdexcept>

namespace neusurf {

Tape::VarId eikonal_loss_graph(Tape& tape, Tape::VarId gradients) {
  if (tape.value(gradients).cols() == 0)
    throw std::invalid_argument("eikonal_loss: empty gradient batch");
  Tape::VarId norms = tape.colwise_norm(gradients);
  return tape.mean_all(tape.square(tape.add_const(norms, -1.0)));
}

Real eikonal_loss_plain(const Mat& gradients) {
  if (gradients.cols() == 0)
    throw std::invalid_argument("eikonal_loss: empty gradient batch");
  Real acc = 0.0;
  for (Eigen::Index j = 0; j < gradients.cols(); ++j) {
    const Real d = gradients.col(j).norm() - 1.0;
    acc += d * d;
  }
  return acc / static_cast<Real>(gradients.cols());
}

Real curvature_loss_plain(const std::function<Mat(const Mat&)>& gradient_fn,
                          const Mat& points, Real fd_step) {
  if (fd_step <= 0.0) throw std::invalid_argument("curvature_loss: fd_step <= 0");
  const Eigen::Index n = points.cols();
  Vec lap = Vec::Zero(n);
  for (int a = 0; a < 3; ++a) {
    Mat plus = points, minus = points;
    plus.row(a).array() += fd_step;
    minus.row(a).array() -= fd_step;
    const Mat gp = gradient_fn(plus);
    const Mat gm = gradient_fn(minus);
    lap += ((gp.row(a) - gm.row(a)) / (2.0 * fd_step)).transpose();
  }
  return lap.cwiseAbs().sum() / static_cast<Real>(n);
}

Real curvature_loss_plain(const SdfField& field, const Mat& points, Real fd_step) {
  return curvature_loss_plain(
      [&field](const Mat& p) { return field.gradient_plain(p); }, points, fd_step);
}

Tape::VarId curvature_loss_graph(Tape& tape, const SdfField& field,
                                 const Mat& points, Real fd_step) {
  if (fd_step <= 0.0) throw std::invalid_argument("curvature_loss: fd_step <= 0");
  Tape::VarId lap = -1;
  for (int a = 0; a < 3; ++a) {
    Mat plus = points, minus = points;
    plus.row(a).array() += fd_step;
    minus.row(a).array() -= fd_step;
    auto gp = field.eval_graph(tape, tape.constant(plus), /*want_gradient=*/true);
    auto gm = field.eval_graph(tape, tape.constant(minus), /*want_gradient=*/true);
    Tape::VarId diff = tape.sub(tape.slice_rows(gp.gradient, a, 1),
                                tape.slice_rows(gm.gradient, a, 1));
    lap = (lap < 0) ? diff : tape.add(lap, diff);
  }
  return tape.mean_all(tape.abs(tape.scale(lap, 1.0 / (2.0 * fd_step))));
}

}  // namespace neusurf
