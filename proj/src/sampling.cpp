#include "neusurf/render/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace neusurf {

Vec stratified_samples(Real t_near, Real t_far, int n, bool jitter, Rng* rng) {
  if (n < 2) throw std::invalid_argument("stratified_samples: need N >= 2");
  if (!(t_near < t_far))
    throw std::invalid_argument("stratified_samples: empty interval");
  if (jitter && !rng)
    throw std::invalid_argument("stratified_samples: jitter requires an rng");
  const Real range = t_far - t_near;
  Vec t(n);
  for (int i = 0; i < n; ++i) {
    const Real offset = jitter ? rng->uniform() : 0.5;
    t(i) = t_near + (static_cast<Real>(i) + offset) / static_cast<Real>(n) * range;
  }
  return t;
}

Vec importance_upsample(const Vec& t_coarse, const Vec& segment_weights, int m,
                        Rng& rng) {
  const Eigen::Index n = t_coarse.size();
  if (n < 2) throw std::invalid_argument("importance_upsample: need >= 2 depths");
  if (segment_weights.size() != n - 1)
    throw std::invalid_argument("importance_upsample: need one weight per segment");
  if (segment_weights.minCoeff() < 0.0)
    throw std::invalid_argument("importance_upsample: negative segment weight");

  if (m < 0) throw std::invalid_argument("importance_upsample: negative count");
  Vec extra(m);
  const Real total = segment_weights.sum();
  if (total <= 0.0) {
    // degenerate coarse pass: nothing to guide the placement; fall back to
    // jittered stratified over the whole interval (one draw per sample, same
    // as the guided branch, so rng consumption is independent of the data)
    const Real lo = t_coarse(0), range = t_coarse(n - 1) - t_coarse(0);
    for (int k = 0; k < m; ++k)
      extra(k) = lo + (static_cast<Real>(k) + rng.uniform()) /
                          static_cast<Real>(m) * range;
  } else {
    // inverse-CDF draw over segments, uniform placement within the segment
    Vec cdf(n - 1);
    Real acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      acc += segment_weights(i);
      cdf(i) = acc;
    }
    for (int k = 0; k < m; ++k) {
      const Real u = rng.uniform() * total;
      Eigen::Index seg = 0;
      while (seg + 2 < n && cdf(seg) <= u) ++seg;
      // fractional position of u inside this segment's CDF slab
      const Real lo = seg == 0 ? 0.0 : cdf(seg - 1);
      const Real mass = cdf(seg) - lo;
      const Real frac = mass > 0.0 ? (u - lo) / mass : 0.5;
      extra(k) = t_coarse(seg) + frac * (t_coarse(seg + 1) - t_coarse(seg));
    }
  }

  Vec merged(n + m);
  merged.head(n) = t_coarse;
  merged.tail(m) = extra;
  std::sort(merged.data(), merged.data() + merged.size());
  // Depth lists are contractually strictly increasing; coincidences are
  // measure-zero but cheap to repair exactly.
  for (Eigen::Index i = 1; i < merged.size(); ++i)
    if (merged(i) <= merged(i - 1))
      merged(i) = std::nextafter(merged(i - 1), std::numeric_limits<Real>::max());
  return merged;
}

}  // namespace neusurf
