#pragma once

#include "neusurf/autodiff/encoding.hpp"
#include "neusurf/autodiff/mlp.hpp"
#include "neusurf/autodiff/params.hpp"
#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/rng.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// Signed-distance network: positional encoding -> MLP -> (sdf, feature).
// Output row 0 is the signed distance (positive outside), the remaining rows
// are a feature vector consumed by the color network.
struct SdfFieldConfig {
  int encoding_levels = 6;
  int hidden_width = 128;
  int n_hidden = 4;
  int feature_width = 64;
  Real softplus_beta = 100.0;
  bool geometric_init = true;
  Real init_radius = 0.5;  // initial zero-level set approximates this sphere
};

class SdfField {
 public:
  // Creates parameters in `store` under "sdf.*".
  static SdfField create(ParamStore& store, const SdfFieldConfig& cfg, Rng& rng);

  struct GraphOut {
    Tape::VarId sdf = -1;       // 1 x N
    Tape::VarId features = -1;  // feature_width x N
    Tape::VarId gradient = -1;  // 3 x N, only if requested
  };

  // Builds the evaluation (and optionally the analytic spatial gradient as
  // further graph nodes, so losses of the gradient reach the parameters).
  // `points` may be a constant or differentiable leaf, 3 x N in [-1,1]^3.
  GraphOut eval_graph(Tape& tape, Tape::VarId points, bool want_gradient) const;

  // Tape-free evaluation; any output pointer may be null.  Throws on
  // non-finite input.
  void eval_plain(const Mat& points, Mat* sdf, Mat* features, Mat* gradient) const;

  // Conveniences over eval_plain.
  Mat sdf_plain(const Mat& points) const;
  Mat gradient_plain(const Mat& points) const;

  const SdfFieldConfig& config() const { return cfg_; }
  const EncodingConfig& encoding() const { return enc_; }

 private:
  SdfFieldConfig cfg_;
  EncodingConfig enc_;
  Mlp mlp_;
};

}  // namespace neusurf
