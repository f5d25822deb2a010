#pragma once

#include "neusurf/core/rng.hpp"
#include "neusurf/core/types.hpp"

namespace neusurf {

// N depths in [t_near, t_far], one per uniform stratum.  jitter=false puts
// each depth at its stratum midpoint; jitter=true draws uniformly inside the
// stratum (one rng draw per sample).
Vec stratified_samples(Real t_near, Real t_far, int n, bool jitter, Rng* rng);

// Draws `m` extra depths from the piecewise-constant distribution over the
// coarse segments [t_i, t_{i+1}] with mass proportional to the coarse weight
// w_i of each segment, merges them with the coarse depths, and returns the
// sorted union (size N + m, strictly increasing).  All-zero weights fall
// back to jittered stratified sampling over the full interval.  Consumes
// exactly m rng draws either way.
Vec importance_upsample(const Vec& t_coarse, const Vec& segment_weights, int m,
                        Rng& rng);

}  // namespace neusurf
