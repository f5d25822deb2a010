#include "neusurf/autodiff/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "neusurf/autodiff/scalar_ops.hpp"

namespace neusurf {

Mlp Mlp::create(ParamStore& store, const std::string& prefix,
                const MlpConfig& cfg, Rng& rng) {
  if (cfg.n_hidden < 1) throw std::invalid_argument("Mlp: need >= 1 hidden layer");
  Mlp mlp;
  mlp.cfg_ = cfg;
  const int n_layers = cfg.n_hidden + 1;
  for (int l = 0; l < n_layers; ++l) {
    const int in = (l == 0) ? cfg.input_dim : cfg.hidden_width;
    const int out = (l == n_layers - 1) ? cfg.output_dim : cfg.hidden_width;
    Mat w(out, in);
    const Real stddev = std::sqrt(2.0 / static_cast<Real>(out));
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal(0.0, stddev);
    mlp.w_.push_back(store.add(prefix + ".w" + std::to_string(l), std::move(w)));
    mlp.b_.push_back(store.add(prefix + ".b" + std::to_string(l), Mat::Zero(out, 1)));
  }
  return mlp;
}

MlpTrace Mlp::forward_graph(Tape& tape, Tape::VarId input) const {
  MlpTrace trace;
  Tape::VarId h = input;
  const int n_layers = cfg_.n_hidden + 1;
  for (int l = 0; l < n_layers; ++l) {
    if (w_[l]->var < 0) throw std::logic_error("Mlp: parameters not bound to tape");
    Tape::VarId z = tape.add_colvec(tape.matmul(w_[l]->var, h), b_[l]->var);
    if (l < n_layers - 1) {
      trace.z.push_back(z);
      h = tape.softplus(z, cfg_.softplus_beta);
    } else {
      trace.out = z;
    }
  }
  return trace;
}

Mat Mlp::forward_plain(const Mat& input, std::vector<Mat>* z_cache) const {
  if (z_cache) z_cache->clear();
  Mat h = input;
  const int n_layers = cfg_.n_hidden + 1;
  for (int l = 0; l < n_layers; ++l) {
    Mat z = (w_[l]->value * h).colwise() + b_[l]->value.col(0);
    if (l < n_layers - 1) {
      if (z_cache) z_cache->push_back(z);
      const Real beta = cfg_.softplus_beta;
      h = z.unaryExpr([beta](Real x) { return softplus_scalar(x, beta); });
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Tape::VarId Mlp::input_gradient_graph(Tape& tape, const MlpTrace& trace,
                                      int out_row) const {
  // Reverse chain for d(out_row)/d(input), built from forward nodes:
  //   row = e_r^T W_last diag(act'(z_{L-1})) W_{L-1} ... diag(act'(z_0)) W_0
  // evaluated right-to-left as column batches:
  //   V_{L-1} = act'(z_{L-1}) .* (W_last row r)^T
  //   V_l     = act'(z_l) .* (W_{l+1}^T V_{l+1})
  //   result  = W_0^T V_0
  // act'(z) = sigmoid(beta z).  Everything is ordinary graph nodes, so one
  // backward pass differentiates through this gradient as well.
  const int n_hidden = cfg_.n_hidden;
  if (static_cast<int>(trace.z.size()) != n_hidden)
    throw std::logic_error("Mlp: trace does not match configuration");
  Tape::VarId u =
      tape.transpose(tape.slice_rows(w_.back()->var, out_row, 1));  // width x 1
  Tape::VarId v = -1;
  for (int l = n_hidden - 1; l >= 0; --l) {
    Tape::VarId dact =
        tape.sigmoid(tape.scale(trace.z[static_cast<std::size_t>(l)],
                                cfg_.softplus_beta));
    if (l == n_hidden - 1)
      v = tape.mul_colvec(dact, u);
    else
      v = tape.mul(dact, tape.matmul_tn(w_[static_cast<std::size_t>(l) + 1]->var, v));
  }
  return tape.matmul_tn(w_[0]->var, v);
}

Mat Mlp::input_gradient_plain(const std::vector<Mat>& z_cache, int out_row) const {
  const int n_hidden = cfg_.n_hidden;
  if (static_cast<int>(z_cache.size()) != n_hidden)
    throw std::logic_error("Mlp: z cache does not match configuration");
  const Real beta = cfg_.softplus_beta;
  auto dact = [beta](const Mat& z) {
    return Mat(z.unaryExpr([beta](Real x) { return softplus_deriv_scalar(x, beta); }));
  };
  Mat v;
  for (int l = n_hidden - 1; l >= 0; --l) {
    Mat d = dact(z_cache[static_cast<std::size_t>(l)]);
    if (l == n_hidden - 1) {
      Vec u = w_.back()->value.row(out_row).transpose();
      v = d.array().colwise() * u.array();
    } else {
      v = d.cwiseProduct(w_[static_cast<std::size_t>(l) + 1]->value.transpose() * v);
    }
  }
  return w_[0]->value.transpose() * v;
}

}  // namespace neusurf
