#pragma once

#include <string>
#include <vector>

#include "neusurf/autodiff/params.hpp"
#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/rng.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// Fully connected network: n_hidden softplus(beta) layers of uniform width,
// then a linear output layer.  Activations are smooth so spatial gradients
// of the output exist everywhere (required for the analytic-gradient chain
// and for second-order training terms).
struct MlpConfig {
  int input_dim = 3;
  int output_dim = 1;
  int hidden_width = 64;
  int n_hidden = 3;
  Real softplus_beta = 100.0;
};

// Graph handles from one forward pass, kept so further structure (the
// input-gradient chain) can be built on top of the same nodes.
struct MlpTrace {
  std::vector<Tape::VarId> z;  // pre-activations, one per hidden layer
  Tape::VarId out = -1;        // output_dim x batch
};

class Mlp {
 public:
  // Creates parameters in `store` with names "<prefix>.wK" / "<prefix>.bK".
  // Weights start N(0, sqrt(2/fan_out)), biases zero.
  static Mlp create(ParamStore& store, const std::string& prefix,
                    const MlpConfig& cfg, Rng& rng);

  const MlpConfig& config() const { return cfg_; }

  // Forward pass on the tape (parameters must already be bound).
  MlpTrace forward_graph(Tape& tape, Tape::VarId input) const;

  // Tape-free forward pass; optionally records pre-activations for the plain
  // input-gradient chain.
  Mat forward_plain(const Mat& input, std::vector<Mat>* z_cache = nullptr) const;

  // Analytic gradient of output row `out_row` w.r.t. the network input,
  // built as graph nodes (input_dim x batch).  `trace` must come from
  // forward_graph on the same tape.
  Tape::VarId input_gradient_graph(Tape& tape, const MlpTrace& trace,
                                   int out_row) const;

  // Same chain evaluated without a tape; `z_cache` from forward_plain.
  Mat input_gradient_plain(const std::vector<Mat>& z_cache, int out_row) const;

  std::vector<Param*>& weights() { return w_; }
  std::vector<Param*>& biases() { return b_; }
  const std::vector<Param*>& weights() const { return w_; }
  const std::vector<Param*>& biases() const { return b_; }

 private:
  MlpConfig cfg_;
  // Layer l maps width(l) -> width(l+1); w_[l] is (out x in), b_[l] (out x 1).
  std::vector<Param*> w_;
  std::vector<Param*> b_;
};

}  // namespace neusurf
