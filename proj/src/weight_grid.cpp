#include "neusurf/buffer/weight_grid.hpp"

#include <cmath>
#include <stdexcept>

#include "neusurf/core/tensor_file.hpp"

namespace neusurf {

namespace {

// Per-axis cell coordinate, or -1 outside [-1,1].  The upper face belongs to
// the last cell so the domain is closed.
inline std::int64_t axis_cell(Real x, int resolution) {
  if (x < -1.0 || x > 1.0) return -1;
  std::int64_t c = static_cast<std::int64_t>(std::floor((x + 1.0) * 0.5 * resolution));
  if (c == resolution) c = resolution - 1;  // x == 1.0 exactly
  return c;
}

}  // namespace

std::int64_t VoteGrid::cell_of(const Vec3& p) const {
  const std::int64_t cx = axis_cell(p.x(), resolution);
  const std::int64_t cy = axis_cell(p.y(), resolution);
  const std::int64_t cz = axis_cell(p.z(), resolution);
  if (cx < 0 || cy < 0 || cz < 0) return -1;
  return cx + resolution * (cy + resolution * cz);
}

Vec3 VoteGrid::cell_min(std::int64_t cell) const {
  const std::int64_t r = resolution;
  const std::int64_t cx = cell % r;
  const std::int64_t cy = (cell / r) % r;
  const std::int64_t cz = cell / (r * r);
  const Real h = cell_size();
  return Vec3(-1.0 + cx * h, -1.0 + cy * h, -1.0 + cz * h);
}

WeightGridBuffer::WeightGridBuffer(const WeightGridConfig& config)
    : config_(config) {
  if (config.resolution < 1 || config.resolution > 1024)
    throw std::invalid_argument("WeightGridBuffer: resolution out of range");
  if (!(config.contrast >= 0.0))
    throw std::invalid_argument("WeightGridBuffer: contrast must be >= 0");
  const std::size_t cells = static_cast<std::size_t>(config.resolution) *
                            config.resolution * config.resolution;
  hits_.assign(cells, 0);
  weight_sum_.assign(cells, 0.0);
  sdf_sum_.assign(cells, 0.0);
}

void WeightGridBuffer::record(const Mat& positions, const Vec& weights,
                              const Vec& sdf_values) {
  const Eigen::Index n = positions.cols();
  if (positions.rows() != 3)
    throw std::invalid_argument("record: positions must be 3 x n");
  if (weights.size() != n || sdf_values.size() != n)
    throw std::invalid_argument("record: per-sample arrays must match positions");
  // validate the whole batch before touching any accumulator
  if (!positions.allFinite() || !weights.allFinite() || !sdf_values.allFinite())
    throw std::invalid_argument("record: non-finite sample rejected");
  if (n > 0 && weights.minCoeff() < 0.0)
    throw std::invalid_argument("record: negative rendering weight");

  VoteGrid geometry;  // borrow the indexing helpers
  geometry.resolution = config_.resolution;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t cell = geometry.cell_of(positions.col(i));
    if (cell < 0) {
      ++dropped_;
      continue;
    }
    hits_[static_cast<std::size_t>(cell)] += 1;
    weight_sum_[static_cast<std::size_t>(cell)] += weights(i);
    sdf_sum_[static_cast<std::size_t>(cell)] += sdf_values(i);
    ++recorded_;
  }
}

VoteGrid WeightGridBuffer::finalize_vote() const {
  VoteGrid out;
  out.resolution = config_.resolution;
  out.epoch = epoch_;
  out.hits = hits_;
  out.weight_avg.assign(hits_.size(), 0.0);
  out.sdf_avg.assign(hits_.size(), 0.0);
  for (std::size_t c = 0; c < hits_.size(); ++c) {
    if (hits_[c] <= 0) continue;
    const Real inv = 1.0 / static_cast<Real>(hits_[c]);
    out.weight_avg[c] = weight_sum_[c] * inv;
    out.sdf_avg[c] = sdf_sum_[c] * inv;
  }
  return out;
}

void WeightGridBuffer::refresh() {
  snapshot_ = finalize_vote();
  std::fill(hits_.begin(), hits_.end(), 0);
  std::fill(weight_sum_.begin(), weight_sum_.end(), 0.0);
  std::fill(sdf_sum_.begin(), sdf_sum_.end(), 0.0);
  ++epoch_;
}

bool WeightGridBuffer::note_view_complete(int period_views) {
  if (period_views < 1)
    throw std::invalid_argument("note_view_complete: period must be >= 1");
  ++views_seen_;
  if (views_seen_ % period_views != 0) return false;
  refresh();
  return true;
}

namespace {

Mat to_row(const std::vector<Real>& v) {
  Mat row(1, static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index i = 0; i < row.cols(); ++i)
    row(0, i) = v[static_cast<std::size_t>(i)];
  return row;
}

Mat counts_to_row(const std::vector<std::int64_t>& v) {
  Mat row(1, static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index i = 0; i < row.cols(); ++i)
    row(0, i) = static_cast<Real>(v[static_cast<std::size_t>(i)]);
  return row;
}

std::vector<Real> from_row(const Mat& row) {
  std::vector<Real> v(static_cast<std::size_t>(row.cols()));
  for (Eigen::Index i = 0; i < row.cols(); ++i)
    v[static_cast<std::size_t>(i)] = row(0, i);
  return v;
}

std::vector<std::int64_t> counts_from_row(const Mat& row) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(row.cols()));
  for (Eigen::Index i = 0; i < row.cols(); ++i)
    v[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(row(0, i));
  return v;
}

}  // namespace

void WeightGridBuffer::save_state(TensorFile& file, const std::string& prefix) const {
  Mat meta(1, 6);
  meta << static_cast<Real>(config_.resolution), static_cast<Real>(epoch_),
      static_cast<Real>(recorded_), static_cast<Real>(dropped_),
      static_cast<Real>(views_seen_), snapshot_.empty() ? 0.0 : 1.0;
  file.put(prefix + "meta", meta);
  file.put(prefix + "hits", counts_to_row(hits_));
  file.put(prefix + "weight_sum", to_row(weight_sum_));
  file.put(prefix + "sdf_sum", to_row(sdf_sum_));
  if (!snapshot_.empty()) {
    Mat snap_meta(1, 2);
    snap_meta << static_cast<Real>(snapshot_.resolution),
        static_cast<Real>(snapshot_.epoch);
    file.put(prefix + "snapshot.meta", snap_meta);
    file.put(prefix + "snapshot.hits", counts_to_row(snapshot_.hits));
    file.put(prefix + "snapshot.weight_avg", to_row(snapshot_.weight_avg));
    file.put(prefix + "snapshot.sdf_avg", to_row(snapshot_.sdf_avg));
  }
}

void WeightGridBuffer::load_state(const TensorFile& file, const std::string& prefix) {
  if (!file.has(prefix + "meta"))
    throw std::runtime_error("WeightGridBuffer: no saved state under '" + prefix + "'");
  const Mat meta = file.get(prefix + "meta");
  if (meta.cols() != 6)
    throw std::runtime_error("WeightGridBuffer: malformed state metadata");
  if (static_cast<int>(meta(0, 0)) != config_.resolution)
    throw std::runtime_error("WeightGridBuffer: saved resolution " +
                             std::to_string(static_cast<int>(meta(0, 0))) +
                             " does not match configured " +
                             std::to_string(config_.resolution));
  const Mat hits = file.get(prefix + "hits");
  const Mat wsum = file.get(prefix + "weight_sum");
  const Mat fsum = file.get(prefix + "sdf_sum");
  const auto cells = static_cast<Eigen::Index>(hits_.size());
  if (hits.cols() != cells || wsum.cols() != cells || fsum.cols() != cells)
    throw std::runtime_error("WeightGridBuffer: saved cell count mismatch");

  epoch_ = static_cast<int>(meta(0, 1));
  recorded_ = static_cast<std::int64_t>(meta(0, 2));
  dropped_ = static_cast<std::int64_t>(meta(0, 3));
  views_seen_ = static_cast<std::int64_t>(meta(0, 4));
  hits_ = counts_from_row(hits);
  weight_sum_ = from_row(wsum);
  sdf_sum_ = from_row(fsum);

  snapshot_ = VoteGrid{};
  if (meta(0, 5) != 0.0) {
    const Mat snap_meta = file.get(prefix + "snapshot.meta");
    snapshot_.resolution = static_cast<int>(snap_meta(0, 0));
    snapshot_.epoch = static_cast<int>(snap_meta(0, 1));
    if (snapshot_.resolution != config_.resolution)
      throw std::runtime_error("WeightGridBuffer: snapshot resolution mismatch");
    snapshot_.hits = counts_from_row(file.get(prefix + "snapshot.hits"));
    snapshot_.weight_avg = from_row(file.get(prefix + "snapshot.weight_avg"));
    snapshot_.sdf_avg = from_row(file.get(prefix + "snapshot.sdf_avg"));
    if (snapshot_.hits.size() != hits_.size() ||
        snapshot_.weight_avg.size() != hits_.size() ||
        snapshot_.sdf_avg.size() != hits_.size())
      throw std::runtime_error("WeightGridBuffer: snapshot cell count mismatch");
  }
}

std::vector<Real> apply_contrast(const VoteGrid& grid, Real delta) {
  if (grid.empty()) throw std::invalid_argument("apply_contrast: empty grid");
  if (!(delta >= 0.0))
    throw std::invalid_argument("apply_contrast: delta must be >= 0");
  Real mean = 0.0;
  std::int64_t valid_cells = 0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!grid.valid(c)) continue;
    mean += grid.weight_avg[c];
    ++valid_cells;
  }
  if (valid_cells == 0)
    throw std::invalid_argument("apply_contrast: no valid cells");
  mean /= static_cast<Real>(valid_cells);

  std::vector<Real> adjusted(grid.cell_count(), 0.0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!grid.valid(c)) continue;
    const Real w = grid.weight_avg[c];
    const Real v = w + delta * (w - mean);
    adjusted[c] = v < 0.0 ? 0.0 : v;
  }
  return adjusted;
}

Mat resample_targets(const VoteGrid& grid, Real delta, int count, Rng& rng) {
  if (count < 0) throw std::invalid_argument("resample_targets: negative count");
  const std::vector<Real> adjusted = apply_contrast(grid, delta);

  // cumulative mass over valid cells, in cell-index order
  std::vector<std::int64_t> cells;
  std::vector<Real> cdf;
  Real total = 0.0;
  for (std::size_t c = 0; c < adjusted.size(); ++c) {
    if (adjusted[c] <= 0.0) continue;
    total += adjusted[c];
    cells.push_back(static_cast<std::int64_t>(c));
    cdf.push_back(total);
  }
  if (cells.empty() || total <= 0.0)
    throw std::runtime_error("resample_targets: degenerate buffer (no mass)");

  const Real h = grid.cell_size();
  Mat points(3, count);
  for (int k = 0; k < count; ++k) {
    const Real u = rng.uniform() * total;
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {  // first cdf entry strictly above u
      const std::size_t mid = (lo + hi) / 2;
      if (cdf[mid] <= u) lo = mid + 1;
      else hi = mid;
    }
    const Vec3 corner = grid.cell_min(cells[lo]);
    points(0, k) = corner.x() + rng.uniform() * h;
    points(1, k) = corner.y() + rng.uniform() * h;
    points(2, k) = corner.z() + rng.uniform() * h;
  }
  return points;
}

SdfLookup lookup_sdf(const VoteGrid& grid, const Mat& points) {
  if (grid.empty()) throw std::invalid_argument("lookup_sdf: empty grid");
  if (points.rows() != 3)
    throw std::invalid_argument("lookup_sdf: points must be 3 x n");
  const Eigen::Index n = points.cols();
  SdfLookup out;
  out.sdf = Vec::Zero(n);
  out.valid.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t cell = grid.cell_of(points.col(i));
    if (cell < 0 || !grid.valid(static_cast<std::size_t>(cell))) continue;
    out.sdf(i) = grid.sdf_avg[static_cast<std::size_t>(cell)];
    out.valid[static_cast<std::size_t>(i)] = 1;
  }
  return out;
}

void save_vote_grid(const VoteGrid& grid, const std::string& path) {
  TensorFile file;
  Mat meta(1, 2);
  meta << static_cast<Real>(grid.resolution), static_cast<Real>(grid.epoch);
  file.put("meta", meta);
  const Eigen::Index cells = static_cast<Eigen::Index>(grid.cell_count());
  Mat hits(1, cells), w(1, cells), f(1, cells);
  for (Eigen::Index c = 0; c < cells; ++c) {
    hits(0, c) = static_cast<Real>(grid.hits[static_cast<std::size_t>(c)]);
    w(0, c) = grid.weight_avg[static_cast<std::size_t>(c)];
    f(0, c) = grid.sdf_avg[static_cast<std::size_t>(c)];
  }
  file.put("hits", hits);
  file.put("weight_avg", w);
  file.put("sdf_avg", f);
  file.save(path);
}

VoteGrid load_vote_grid(const std::string& path) {
  TensorFile file = TensorFile::load(path);
  const Mat meta = file.get("meta");
  VoteGrid grid;
  grid.resolution = static_cast<int>(meta(0, 0));
  grid.epoch = static_cast<int>(meta(0, 1));
  const Mat hits = file.get("hits");
  const Mat w = file.get("weight_avg");
  const Mat f = file.get("sdf_avg");
  const Eigen::Index cells = static_cast<Eigen::Index>(grid.cell_count());
  if (hits.cols() != cells || w.cols() != cells || f.cols() != cells)
    throw std::runtime_error("load_vote_grid: cell count mismatch in " + path);
  grid.hits.resize(static_cast<std::size_t>(cells));
  grid.weight_avg.resize(static_cast<std::size_t>(cells));
  grid.sdf_avg.resize(static_cast<std::size_t>(cells));
  for (Eigen::Index c = 0; c < cells; ++c) {
    grid.hits[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(hits(0, c));
    grid.weight_avg[static_cast<std::size_t>(c)] = w(0, c);
    grid.sdf_avg[static_cast<std::size_t>(c)] = f(0, c);
  }
  return grid;
}

}  // namespace neusurf
