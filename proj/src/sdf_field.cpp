#include "neusurf/fields/sdf_field.hpp"

#include <cmath>
#include <stdexcept>

namespace neusurf {

SdfField SdfField::create(ParamStore& store, const SdfFieldConfig& cfg, Rng& rng) {
  SdfField field;
  field.cfg_ = cfg;
  field.enc_.input_dim = 3;
  field.enc_.levels = cfg.encoding_levels;

  MlpConfig mc;
  mc.input_dim = field.enc_.output_dim();
  mc.output_dim = 1 + cfg.feature_width;
  mc.hidden_width = cfg.hidden_width;
  mc.n_hidden = cfg.n_hidden;
  mc.softplus_beta = cfg.softplus_beta;
  field.mlp_ = Mlp::create(store, "sdf", mc, rng);

  if (cfg.geometric_init) {
    // Sphere-like start: f(x) ~ ||x|| - r.  Recipe: first layer sees only the
    // raw coordinates (encoded columns zeroed), hidden layers keep their
    // N(0, sqrt(2/fan_out)) draw, and the output layer concentrates at
    // sqrt(pi)/sqrt(fan_in) with bias -r, which makes softplus networks start
    // out as an approximately radial distance field, positive outside.
    Mat& w0 = field.mlp_.weights().front()->value;
    const Real s0 = std::sqrt(2.0) / std::sqrt(static_cast<Real>(w0.rows()));
    for (Eigen::Index i = 0; i < w0.rows(); ++i)
      for (Eigen::Index j = 0; j < w0.cols(); ++j)
        w0(i, j) = j < 3 ? rng.normal(0.0, s0) : 0.0;

    Mat& wl = field.mlp_.weights().back()->value;
    Mat& bl = field.mlp_.biases().back()->value;
    const Real mean = std::sqrt(3.141592653589793238462643383279502884) /
                      std::sqrt(static_cast<Real>(wl.cols()));
    for (Eigen::Index i = 0; i < wl.size(); ++i)
      wl.data()[i] = rng.normal(mean, 1e-4);
    bl.setConstant(-cfg.init_radius);
  }
  return field;
}

SdfField::GraphOut SdfField::eval_graph(Tape& tape, Tape::VarId points,
                                        bool want_gradient) const {
  EncodingTrace enc = encode_graph(tape, points, enc_);
  MlpTrace trace = mlp_.forward_graph(tape, enc.encoded);

  GraphOut out;
  out.sdf = tape.slice_rows(trace.out, 0, 1);
  out.features = tape.slice_rows(trace.out, 1, cfg_.feature_width);
  if (!want_gradient) return out;

  // d f / d x = (d enc / d x)^T  (d f / d enc).  The MLP part comes from the
  // reverse chain; the encoding pullback reuses the forward sin/cos nodes:
  //   d sin(w x_a)/d x_a =  w cos(w x_a),   d cos(w x_a)/d x_a = -w sin(w x_a)
  Tape::VarId g_enc = mlp_.input_gradient_graph(tape, trace, 0);
  const int d = 3;
  std::vector<Tape::VarId> axis_grads;
  for (int a = 0; a < d; ++a) {
    Tape::VarId acc = tape.slice_rows(g_enc, a, 1);  // identity rows
    for (int k = 0; k < enc_.levels; ++k) {
      const Real w = enc_.omega(k);
      const std::size_t idx = static_cast<std::size_t>(k) * d + a;
      Tape::VarId from_sin =
          tape.mul(tape.slice_rows(g_enc, d + 2 * k * d + a, 1), enc.cos_rows[idx]);
      Tape::VarId from_cos =
          tape.mul(tape.slice_rows(g_enc, d + (2 * k + 1) * d + a, 1), enc.sin_rows[idx]);
      acc = tape.add(acc, tape.scale(tape.sub(from_sin, from_cos), w));
    }
    axis_grads.push_back(acc);
  }
  out.gradient = tape.concat_rows(axis_grads);
  return out;
}

void SdfField::eval_plain(const Mat& points, Mat* sdf, Mat* features,
                          Mat* gradient) const {
  if (points.rows() != 3)
    throw std::invalid_argument("SdfField: points must be 3 x N");
  if (!points.allFinite())
    throw std::invalid_argument("SdfField: non-finite input point");

  const Mat enc = encode_plain(points, enc_);
  std::vector<Mat> z_cache;
  const Mat out = mlp_.forward_plain(enc, gradient ? &z_cache : nullptr);
  if (sdf) *sdf = out.topRows(1);
  if (features) *features = out.middleRows(1, cfg_.feature_width);
  if (!gradient) return;

  const Mat g_enc = mlp_.input_gradient_plain(z_cache, 0);
  const int d = 3;
  Mat g(3, points.cols());
  for (int a = 0; a < d; ++a) {
    g.row(a) = g_enc.row(a);
    for (int k = 0; k < enc_.levels; ++k) {
      const Real w = enc_.omega(k);
      for (Eigen::Index j = 0; j < points.cols(); ++j) {
        const Real arg = w * points(a, j);
        g(a, j) += w * (g_enc(d + 2 * k * d + a, j) * std::cos(arg) -
                        g_enc(d + (2 * k + 1) * d + a, j) * std::sin(arg));
      }
    }
  }
  *gradient = std::move(g);
}

Mat SdfField::sdf_plain(const Mat& points) const {
  Mat f;
  eval_plain(points, &f, nullptr, nullptr);
  return f;
}

Mat SdfField::gradient_plain(const Mat& points) const {
  Mat g;
  eval_plain(points, nullptr, nullptr, &g);
  return g;
}

}  // namespace neusurf
