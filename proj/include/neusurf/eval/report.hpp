#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neusurf/eval/metrics.hpp"

namespace neusurf {

struct EvalConfig {
  Eigen::Index sample_count = 100000;  // points drawn from the mesh
  std::uint64_t seed = 7;              // sampling stream
  bool squared = false;                // plain Euclidean distances by default
  int mask_dilation = 1;               // hull tolerance in pixels
};

// Mesh-quality metrics for one extraction.  `view_psnr` is filled by callers
// that also render (the mesh metrics alone do not need the radiance field).
struct EvalReport {
  Real unmasked_cd = 0.0;
  Real masked_cd = 0.0;
  Real noise_percent = 0.0;       // in [0, 100]
  std::vector<Real> view_psnr;    // optional, one entry per rendered view
  Eigen::Index sample_count = 0;  // points drawn per cloud
  int total_faces = 0;
  int removed_faces = 0;
  bool squared = false;
  std::uint64_t seed = 0;
  int mask_dilation = 0;

  void validate() const;  // throws std::invalid_argument out of range
};

// Chamfer distance of the hull-filtered mesh against the reference cloud.
// Throws std::runtime_error if filtering removes every face.
Real masked_cd(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
               const Mat& ref_points, const EvalConfig& config = {});

// Full mesh evaluation: unmasked and masked Chamfer distance plus the
// noise ratio, with both clouds drawn from the same seed so no-op masks give
// bitwise-equal masked and unmasked numbers.
EvalReport evaluate_mesh(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
                         const Mat& ref_points, const EvalConfig& config = {});

// Human-readable block, one metric per line.
std::string format_report(const EvalReport& report);

// Single-row CSV with a header line.
void save_report_csv(const EvalReport& report, const std::string& path);

}  // namespace neusurf
