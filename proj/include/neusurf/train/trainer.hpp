#pragma once

#include <memory>
#include <string>
#include <vector>

#include "neusurf/autodiff/params.hpp"
#include "neusurf/autodiff/tape.hpp"
#include "neusurf/buffer/weight_grid.hpp"
#include "neusurf/core/rng.hpp"
#include "neusurf/core/types.hpp"
#include "neusurf/fields/color_field.hpp"
#include "neusurf/fields/sdf_field.hpp"
#include "neusurf/render/image.hpp"
#include "neusurf/scene/dataset.hpp"
#include "neusurf/train/train_config.hpp"

namespace neusurf {

// ---- optimizer ------------------------------------------------------------

struct AdamConfig {
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real eps = 1e-8;
};

// Bias-corrected adaptive-moment update, in place on `param` (value and both
// moments).  `t` is the 1-based update count.  A gradient with any non-finite
// entry leaves the parameter AND its moments untouched and returns false.
bool adam_step(Param& param, const Mat& grad, Real lr, int t,
               const AdamConfig& adam = {});

// Linear warmup to the base rate over `warmup` iterations, then cosine decay
// toward `floor_frac * base` across the remaining schedule.  `iteration` is
// 0-based; the result is always in (0, base].
Real scheduled_lr(Real base, int iteration, int warmup, int total_iterations,
                  Real floor_frac);

// ---- loss assembly ---------------------------------------------------------

// total = l_rgb + w_eik * l_eik + w_geo * l_geo
Real total_loss_neus(Real l_rgb, Real l_eik, Real l_geo, Real w_eik, Real w_geo);
// total above + w_curv * l_curv
Real total_loss_with_curvature(Real l_rgb, Real l_eik, Real l_geo, Real l_curv,
                               Real w_eik, Real w_geo, Real w_curv);

// ---- training loop ----------------------------------------------------------

// Per-iteration record.  Component values are what entered the total (zero
// when a term was inactive); `psnr` is the batch estimate -10 log10(l_rgb/3).
struct LossBreakdown {
  int iteration = 0;
  int view = 0;
  Real l_rgb = 0, l_eik = 0, l_cd = 0, l_global = 0, l_surf = 0, l_curv = 0;
  Real total = 0;
  Real s = 0;
  Real psnr = 0;
  bool geo_active = false;  // geometric losses contributed this iteration
  bool stepped = true;      // false: non-finite loss/gradient, update skipped
  Eigen::Index rays = 0;
  Eigen::Index pulled = 0;        // surviving pulled points |x_q|
  Eigen::Index valid_points = 0;  // |x_q'| backed by visited buffer cells
};

std::string metrics_csv_header();  // iteration,l_rgb,...,s,psnr
std::string metrics_csv_row(const LossBreakdown& row);
void save_metrics_csv(const std::vector<LossBreakdown>& rows,
                      const std::string& path);

// One ray batch's fully built loss graph plus the values the buffer should
// record.  Produced by Trainer::build_step_graph.
struct StepGraph {
  std::unique_ptr<Tape> tape;
  Tape::VarId total = -1;
  LossBreakdown parts;
  // Per-sample payload for the weight buffer (empty when refinement is off).
  Mat record_positions;  // 3 x n
  Vec record_weights;
  Vec record_sdf;
};

// Orchestrates one reconstruction run: round-robin view schedule, NeuS-style
// hierarchical ray rendering, the self-supervised geometric refinement, an
// adaptive-moment optimizer, and exact checkpointing.
//
// Batch recipe (pinned; the add-on purity test reimplements it):
//   view   = iteration % n_views
//   pixels = rays_per_batch draws of uniform_index(width*height) from the
//            ray stream, pixel = (index % width, index / width); rays that
//            miss the unit domain sphere are dropped from the batch
//   coarse = stratified_samples(near, far, coarse_samples, jitter, ray rng)
//            per ray in batch order; SDF evaluated tape-free in one batch
//   fine   = importance_upsample per ray from the coarse NeuS weights at the
//            current s, then one graph pass over the merged samples
// Rho (through s = s_min + exp(rho)) is a trainable parameter named "s.rho".
// With w_geo = 0 the buffer, the target stream, and every refinement node
// are skipped entirely — the loop IS the baseline loop.
//
// RNG streams: rays = seed, targets = seed + 1, init = seed + 2.
class Trainer {
 public:
  // The dataset must outlive the trainer.  Throws on an invalid config or an
  // empty/inconsistent dataset.
  Trainer(const TrainConfig& config, const Dataset& dataset);

  // Builds the next iteration's loss graph.  Consumes rng and the view
  // cursor but touches neither parameters nor the buffer — step() is
  // build + backward + optimizer + buffer bookkeeping.
  StepGraph build_step_graph();

  // One full training iteration.  Appends to the in-memory metric log.
  LossBreakdown step();

  // Convenience: run `count` iterations (stops at nothing else).
  void run(int count);

  int iteration() const { return iteration_; }
  Real s_value() const;
  const TrainConfig& config() const { return config_; }
  const SdfField& sdf_field() const { return sdf_; }
  const ColorField& color_field() const { return color_; }
  const ParamStore& params() const { return store_; }
  ParamStore& params_mutable() { return store_; }  // tests/diagnostics
  bool refinement_enabled() const { return buffer_ != nullptr; }
  const WeightGridBuffer* buffer() const { return buffer_.get(); }
  const std::vector<LossBreakdown>& log() const { return log_; }

  // Tape-free render of an arbitrary camera with the current fields (fixed
  // internal sampling seed — deterministic, independent of training streams).
  Image render_view(const Camera& camera) const;

  // Checkpointing: parameters with optimizer moments, counters, all rng
  // stream states, and (when refinement is on) the full buffer state.
  // Loading rejects wrong format/version, shape mismatches, and a
  // refinement flag that disagrees with this trainer's config.
  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

 private:
  struct RayBatch;  // internal: pixels, rays, merged depths

  RayBatch plan_batch();

  TrainConfig config_;
  const Dataset* dataset_;
  ParamStore store_;
  SdfField sdf_;
  ColorField color_;
  Param* rho_ = nullptr;
  std::unique_ptr<WeightGridBuffer> buffer_;
  Rng ray_rng_;
  Rng target_rng_;
  int iteration_ = 0;
  int adam_steps_ = 0;
  std::vector<LossBreakdown> log_;
};

}  // namespace neusurf
