#include "neusurf/fields/color_field.hpp"

#include <stdexcept>

#include "neusurf/autodiff/scalar_ops.hpp"

namespace neusurf {

ColorField ColorField::create(ParamStore& store, const ColorFieldConfig& cfg,
                              Rng& rng) {
  ColorField field;
  field.cfg_ = cfg;
  field.dir_enc_.input_dim = 3;
  field.dir_enc_.levels = cfg.dir_encoding_levels;

  MlpConfig mc;
  mc.input_dim = 3 + field.dir_enc_.output_dim() + 3 + cfg.feature_width;
  mc.output_dim = 3;
  mc.hidden_width = cfg.hidden_width;
  mc.n_hidden = cfg.n_hidden;
  mc.softplus_beta = cfg.softplus_beta;
  field.mlp_ = Mlp::create(store, "color", mc, rng);
  return field;
}

Tape::VarId ColorField::eval_graph(Tape& tape, Tape::VarId x, Tape::VarId dirs,
                                   Tape::VarId normals, Tape::VarId features) const {
  Tape::VarId n_unit = tape.div_rowvec(
      normals, tape.clamp_min(tape.colwise_norm(normals), 1e-12));
  EncodingTrace denc = encode_graph(tape, dirs, dir_enc_);
  Tape::VarId input = tape.concat_rows({x, denc.encoded, n_unit, features});
  MlpTrace trace = mlp_.forward_graph(tape, input);
  return tape.sigmoid(trace.out);
}

Mat ColorField::eval_plain(const Mat& x, const Mat& dirs, const Mat& normals,
                           const Mat& features) const {
  if (x.rows() != 3 || dirs.rows() != 3 || normals.rows() != 3)
    throw std::invalid_argument("ColorField: x/dirs/normals must be 3 x N");
  const Eigen::Index n = x.cols();
  if (dirs.cols() != n || normals.cols() != n || features.cols() != n)
    throw std::invalid_argument("ColorField: batch size mismatch");

  Mat n_unit(3, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Real norm = normals.col(j).norm();
    n_unit.col(j) = normals.col(j) / (norm < 1e-12 ? 1e-12 : norm);
  }
  Mat input(3 + dir_enc_.output_dim() + 3 + cfg_.feature_width, n);
  input.topRows(3) = x;
  input.middleRows(3, dir_enc_.output_dim()) = encode_plain(dirs, dir_enc_);
  input.middleRows(3 + dir_enc_.output_dim(), 3) = n_unit;
  input.bottomRows(cfg_.feature_width) = features;
  Mat out = mlp_.forward_plain(input);
  return out.unaryExpr([](Real v) { return sigmoid_scalar(v); });
}

}  // namespace neusurf
