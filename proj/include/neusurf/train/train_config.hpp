#pragma once

#include <cstdint>
#include <string>

#include "neusurf/core/types.hpp"
#include "neusurf/fields/color_field.hpp"
#include "neusurf/fields/sdf_field.hpp"

namespace neusurf {

// Everything one training run depends on besides the dataset itself.
// Parsed from a plain-text key-value file (see parse_train_config below);
// every field has a working default so a config file only lists overrides.
struct TrainConfig {
  // Optimization.
  int iterations = 2000;
  Real learning_rate = 5e-4;
  int warmup_iterations = 200;  // linear ramp, then cosine decay
  Real lr_floor = 0.05;         // decay target as a fraction of learning_rate

  // Ray batch geometry (one camera per iteration, round-robin).
  int rays_per_batch = 64;
  int coarse_samples = 64;  // stratified
  int fine_samples = 64;    // importance-added

  // Loss weights.
  Real w_eik = 0.1;
  Real w_geo = 0.1;     // 0 disables the refinement path entirely
  Real w_surf = 1.0;    // inner weight inside the geometric loss
  Real w_global = 1.0;  // inner weight inside the geometric loss
  Real w_curv = 5e-4;   // only active in the curvature variant
  bool with_curvature = false;

  // Weight buffer / refinement.
  int refresh_period_views = 24;  // buffer refresh cadence, in completed views
  int grid_resolution = 64;       // buffer cells per axis
  Real contrast = 0.5;            // vote-sharpening delta

  // Opacity sharpness s = s_min + exp(rho), rho trainable.
  Real s_init = 20.0;
  Real s_min = 1.0;

  // Curvature regularizer sampling.
  int curvature_points = 32;
  Real curvature_fd_step = 1e-3;

  // Compositing background (gray level, applied to all three channels).
  Real background = 0.05;

  std::uint64_t seed = 42;

  // Network shapes.
  SdfFieldConfig sdf;
  ColorFieldConfig color;

  // Throws std::invalid_argument with the offending field named.
  void validate() const;
};

// Parses the plain-text schema: one `key = value` per line, `#` starts a
// comment, blank lines ignored, later duplicates win.  Unknown keys and
// unparsable values are rejected.  Keys (all optional):
//   iterations, learning_rate, warmup_iterations, lr_floor,
//   rays_per_batch, coarse_samples, fine_samples,
//   w_eik, w_geo, w_surf, w_global, w_curv, variant (neus|neus_curvature),
//   refresh_period_views, grid_resolution, contrast,
//   s_init, s_min, curvature_points, curvature_fd_step, background, seed,
//   sdf_encoding_levels, sdf_hidden_width, sdf_hidden_layers,
//   sdf_feature_width, sdf_softplus_beta, sdf_init_radius,
//   color_hidden_width, color_hidden_layers, color_dir_encoding_levels
TrainConfig parse_train_config(const std::string& text);

// Reads and parses a config file; throws std::runtime_error when unreadable.
TrainConfig load_train_config(const std::string& path);

}  // namespace neusurf
