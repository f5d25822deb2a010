#pragma once

#include "neusurf/core/rng.hpp"
#include "neusurf/core/types.hpp"
#include "neusurf/eval/silhouettes.hpp"
#include "neusurf/mesh/mesh.hpp"
#include "neusurf/scene/primitives.hpp"

namespace neusurf {

// Uniform surface sampling: triangles chosen with probability proportional
// to area, placement uniform in barycentric coordinates.  Throws
// std::invalid_argument on an empty mesh, count < 1, or zero total area.
Mat sample_mesh_points(const TriangleMesh& mesh, Eigen::Index count, Rng& rng);

// Bidirectional mean Chamfer distance between point clouds (3 x N each):
// the average of the two directional means of nearest-neighbor distances.
// Plain Euclidean by default (the usual convention for reporting mesh
// accuracy); squared = true uses squared distances (the training loss
// convention).  Throws std::invalid_argument on empty or malformed input.
Real chamfer_eval(const Mat& pred, const Mat& ref, bool squared = false);

// Silhouette carving.  A face survives iff all three of its vertices lie
// inside the mask in every view that sees them; a view sees a vertex when it
// projects in front of the camera and inside the image bounds.  "Inside the
// mask" accepts any on-pixel within `dilation` pixels of the projected
// pixel, absorbing the half-pixel rasterization error of rendered
// silhouettes.  Vertices unused by surviving faces are dropped (indices are
// compacted in order).  Requires at least one view.
struct HullFilter {
  TriangleMesh inside;
  int removed_faces = 0;
};
HullFilter visual_hull_filter(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
                              int dilation = 1);

// Percentage of faces outside the visual hull: 100 * removed / total.
// Requires a mesh with at least one face.
Real mesh_noise_ratio(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
                      int dilation = 1);

// Peak signal-to-noise ratio between two same-sized images in [0,1];
// +infinity for identical images.
Real psnr(const Image& img, const Image& ref);

// Uniform samples of a scene's union surface: primitives chosen by surface
// area, points placed uniformly on the winning primitive and rejected when
// another primitive swallows them.  The returned points satisfy
// |scene_sdf| <= 1e-9.  Throws std::invalid_argument on an empty scene or
// count < 1.
Mat sample_surface(const Scene& scene, Eigen::Index count, Rng& rng);

}  // namespace neusurf
