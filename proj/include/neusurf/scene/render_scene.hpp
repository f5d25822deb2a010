#pragma once

#include "neusurf/render/camera.hpp"
#include "neusurf/render/image.hpp"
#include "neusurf/scene/primitives.hpp"

namespace neusurf {

// Sphere-tracing stop criteria: a march step lands on the surface once the
// distance drops below the hit epsilon, and gives up after the step budget.
inline constexpr Real kTraceHitEpsilon = 1e-5;
inline constexpr int kTraceMaxSteps = 256;

struct TraceResult {
  bool hit = false;
  Real t = 0.0;          // ray parameter of the hit
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int primitive = -1;
};

// Marches t <- t + f(o + t d) from t_near; stops on |f| < kTraceHitEpsilon
// (hit) or when t leaves [t_near, t_far] or the step budget runs out (miss).
// Exact SDFs make every step safe: f lower-bounds the distance to the
// nearest surface.
TraceResult sphere_trace(const Scene& scene, const Vec3& origin,
                         const Vec3& dir, Real t_near, Real t_far);

// Lambertian shading with a flat ambient floor, saturated at white:
// albedo * min(1, ambient + max(0, n . l)).
Vec3 shade_lambert(const Scene& scene, const Vec3& albedo, const Vec3& normal);

struct ViewRender {
  Image color;  // shaded hits over the background
  Image mask;   // exactly the hit mask: 1 where the trace hit, else 0
  Vec depth;    // ray parameter t per pixel, 0 where the trace missed
};

// Traces every pixel of `camera` against `scene`.  Rays that miss the unit
// bounding sphere (the training domain) render as pure background, so the
// ground truth never contains content a domain-bounded model cannot express.
ViewRender render_view(const Scene& scene, const Camera& camera);

}  // namespace neusurf
