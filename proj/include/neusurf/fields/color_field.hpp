#pragma once

#include "neusurf/autodiff/encoding.hpp"
#include "neusurf/autodiff/mlp.hpp"
#include "neusurf/autodiff/params.hpp"
#include "neusurf/core/rng.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// Radiance network: (x, encoded view direction, unit surface normal, SDF
// feature vector) -> rgb in [0,1]^3 via a sigmoid output.
struct ColorFieldConfig {
  int hidden_width = 64;
  int n_hidden = 3;
  int dir_encoding_levels = 2;
  Real softplus_beta = 100.0;
  int feature_width = 64;  // must match the SDF field
};

class ColorField {
 public:
  // Creates parameters in `store` under "color.*".
  static ColorField create(ParamStore& store, const ColorFieldConfig& cfg, Rng& rng);

  // All inputs are 3 x N except features (feature_width x N).  `normals` need
  // not be unit length; they are normalized internally (zero-norm guarded).
  Tape::VarId eval_graph(Tape& tape, Tape::VarId x, Tape::VarId dirs,
                         Tape::VarId normals, Tape::VarId features) const;

  Mat eval_plain(const Mat& x, const Mat& dirs, const Mat& normals,
                 const Mat& features) const;

  const ColorFieldConfig& config() const { return cfg_; }

 private:
  ColorFieldConfig cfg_;
  EncodingConfig dir_enc_;
  Mlp mlp_;
};

}  // namespace neusurf
