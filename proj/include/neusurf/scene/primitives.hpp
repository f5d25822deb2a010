#pragma once

#include <string>
#include <vector>

#include "neusurf/core/types.hpp"

namespace neusurf {

// Analytic signed-distance primitives for synthetic ground truth.  Every
// SDF is exact (Lipschitz 1) with a closed-form unit gradient away from the
// medial axis, so traced depths and pulled points can be checked against
// geometry instead of against the code itself.

enum class PrimitiveKind { kSphere, kBox, kTorus };

struct ScenePrimitive {
  PrimitiveKind kind = PrimitiveKind::kSphere;
  Vec3 center = Vec3::Zero();
  // sphere: size.x = radius.  box: half extents.  torus: size.x = ring
  // radius, size.y = tube radius (ring lies in the local xy plane).
  Vec3 size = Vec3(0.5, 0.5, 0.5);
  Mat3 rotation = Mat3::Identity();  // world-from-local, orthonormal
  Vec3 albedo = Vec3(0.8, 0.8, 0.8);
};

ScenePrimitive make_sphere(const Vec3& center, Real radius, const Vec3& albedo);
ScenePrimitive make_box(const Vec3& center, const Vec3& half_extents,
                        const Vec3& albedo, const Mat3& rotation = Mat3::Identity());
ScenePrimitive make_torus(const Vec3& center, Real ring_radius, Real tube_radius,
                          const Vec3& albedo, const Mat3& rotation = Mat3::Identity());

// Exact distance and unit gradient of one primitive at a world point.
Real primitive_sdf(const ScenePrimitive& primitive, const Vec3& p);
Vec3 primitive_gradient(const ScenePrimitive& primitive, const Vec3& p);

struct Scene {
  std::vector<ScenePrimitive> primitives;
  Vec3 light_dir = Vec3(0.4, 0.7, 0.6).normalized();  // toward the light
  Vec3 background = Vec3(0.05, 0.05, 0.05);
  Real ambient = 0.1;
  // Primitives [0, n_foreground) form the object of interest; anything after
  // is clutter.  Silhouette masks and evaluation references cover only the
  // foreground.  -1 means every primitive is foreground.
  int n_foreground = -1;

  // The scene restricted to its foreground primitives.
  Scene foreground() const;
};

struct SceneSample {
  Real sdf = 0.0;
  Vec3 normal = Vec3::UnitZ();  // gradient of the winning primitive
  int primitive = -1;
};

// Union SDF: min over primitives (lowest index wins ties); the normal and
// albedo come from the winning primitive.
SceneSample scene_sdf(const Scene& scene, const Vec3& p);

}  // namespace neusurf
