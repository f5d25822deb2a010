#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neusurf/core/rng.hpp"
#include "neusurf/core/tensor_file.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// Dense voxel grid over [-1,1]^3 that accumulates per-sample rendering
// weights and SDF values from many views, then turns them into per-cell
// averages ("votes") that drive target resampling and SDF lookups.
//
// Double-buffered: `record` writes into an active accumulator while readers
// (resampling, lookups) see the immutable snapshot frozen at the last
// refresh.  Cell layout: index = x + R*(y + R*z), x fastest; a point owns
// the cell floor((p+1)/2 * R) per axis, with the closed upper face p = 1
// assigned to the last cell.

struct WeightGridConfig {
  int resolution = 64;  // cells per axis
  Real contrast = 0.5;  // delta of the vote-sharpening transform
};

// Finalized per-cell averages for one accumulation epoch.
struct VoteGrid {
  int resolution = 0;
  int epoch = -1;  // which refresh produced it (-1: never refreshed)
  std::vector<std::int64_t> hits;  // n per cell
  std::vector<Real> weight_avg;    // mean rendering weight, 0 where n = 0
  std::vector<Real> sdf_avg;       // mean SDF, 0 where n = 0

  bool empty() const { return resolution == 0; }
  std::size_t cell_count() const {
    const std::size_t r = static_cast<std::size_t>(resolution);
    return r * r * r;
  }
  bool valid(std::size_t cell) const { return hits[cell] > 0; }

  Real cell_size() const { return 2.0 / resolution; }
  // -1 when the point lies outside [-1,1]^3
  std::int64_t cell_of(const Vec3& p) const;
  Vec3 cell_min(std::int64_t cell) const;  // lower corner in world units
};

class WeightGridBuffer {
 public:
  explicit WeightGridBuffer(const WeightGridConfig& config);

  int resolution() const { return config_.resolution; }
  const WeightGridConfig& config() const { return config_; }

  // Accumulates one batch of (position, weight, sdf) samples into the active
  // grid.  Out-of-domain samples are skipped and counted; a batch containing
  // any non-finite value or negative weight is rejected whole (state
  // untouched).
  void record(const Mat& positions, const Vec& weights, const Vec& sdf_values);

  std::int64_t recorded_samples() const { return recorded_; }
  std::int64_t dropped_samples() const { return dropped_; }

  // Averages of the ACTIVE accumulator (what refresh() would freeze now).
  VoteGrid finalize_vote() const;

  // Freezes the active accumulator into the snapshot, zeroes every
  // accumulator, and increments the epoch counter.
  void refresh();

  int epoch() const { return epoch_; }
  bool has_snapshot() const { return !snapshot_.empty(); }
  const VoteGrid& snapshot() const { return snapshot_; }

  // View-schedule helper: call once per completed view visit; triggers
  // refresh() every `period_views` calls and reports whether it fired.
  bool note_view_complete(int period_views);

  // Serializes the complete double-buffered state (raw accumulator sums,
  // snapshot, counters) into `file` under `prefix`; load_state restores it
  // bit-exactly so a resumed run replays like an uninterrupted one.  Loading
  // rejects a mismatched resolution or a container missing the entries.
  void save_state(TensorFile& file, const std::string& prefix) const;
  void load_state(const TensorFile& file, const std::string& prefix);

 private:
  WeightGridConfig config_;
  std::vector<std::int64_t> hits_;
  std::vector<Real> weight_sum_;
  std::vector<Real> sdf_sum_;
  VoteGrid snapshot_;
  std::int64_t recorded_ = 0;
  std::int64_t dropped_ = 0;
  std::int64_t views_seen_ = 0;
  int epoch_ = 0;
};

// Vote sharpening: w' = max(w + delta * (w - mean), 0), the mean taken
// uniformly over valid cells.  Returns one value per cell (0 on invalid
// cells).  Rejects delta < 0 and grids with no valid cell.
std::vector<Real> apply_contrast(const VoteGrid& grid, Real delta);

// Draws `count` points from the categorical distribution over valid cells
// proportional to the contrast-adjusted weights, uniformly jittered inside
// the chosen cell.  Consumes exactly 4 rng draws per point.  Rejects empty
// grids and all-zero adjusted weight.
Mat resample_targets(const VoteGrid& grid, Real delta, int count, Rng& rng);

struct SdfLookup {
  Vec sdf;                          // averaged SDF, 0 where invalid
  std::vector<std::uint8_t> valid;  // 1 when the owning cell has hits
};
// Per-point averaged SDF from the grid; out-of-domain points and unvisited
// cells are flagged invalid.
SdfLookup lookup_sdf(const VoteGrid& grid, const Mat& points);

// Debug dump of a finalized grid (named-array container with resolution,
// epoch, hit counts, and both averages); load reverses it.
void save_vote_grid(const VoteGrid& grid, const std::string& path);
VoteGrid load_vote_grid(const std::string& path);

}  // namespace neusurf
