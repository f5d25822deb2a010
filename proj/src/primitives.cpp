#include "neusurf/scene/primitives.hpp"

#include <cmath>
#include <stdexcept>

namespace neusurf {

ScenePrimitive make_sphere(const Vec3& center, Real radius, const Vec3& albedo) {
  if (!(radius > 0.0)) throw std::invalid_argument("make_sphere: radius must be > 0");
  ScenePrimitive p;
  p.kind = PrimitiveKind::kSphere;
  p.center = center;
  p.size = Vec3(radius, 0.0, 0.0);
  p.albedo = albedo;
  return p;
}

ScenePrimitive make_box(const Vec3& center, const Vec3& half_extents,
                        const Vec3& albedo, const Mat3& rotation) {
  if (!(half_extents.minCoeff() > 0.0))
    throw std::invalid_argument("make_box: half extents must be > 0");
  ScenePrimitive p;
  p.kind = PrimitiveKind::kBox;
  p.center = center;
  p.size = half_extents;
  p.rotation = rotation;
  p.albedo = albedo;
  return p;
}

ScenePrimitive make_torus(const Vec3& center, Real ring_radius, Real tube_radius,
                          const Vec3& albedo, const Mat3& rotation) {
  if (!(ring_radius > 0.0) || !(tube_radius > 0.0) || tube_radius >= ring_radius)
    throw std::invalid_argument("make_torus: need ring > tube > 0");
  ScenePrimitive p;
  p.kind = PrimitiveKind::kTorus;
  p.center = center;
  p.size = Vec3(ring_radius, tube_radius, 0.0);
  p.rotation = rotation;
  p.albedo = albedo;
  return p;
}

namespace {

// local-frame distance + gradient; gradient is unit away from medial axes
void box_local(const Vec3& p, const Vec3& b, Real* f, Vec3* g) {
  const Vec3 q = p.cwiseAbs() - b;
  const Vec3 outside = q.cwiseMax(0.0);
  const Real out_len = outside.norm();
  const Real inside = std::min(q.maxCoeff(), 0.0);
  *f = out_len + inside;
  if (out_len > 0.0) {
    Vec3 dir = outside / out_len;
    for (int a = 0; a < 3; ++a)
      if (p(a) < 0.0) dir(a) = -dir(a);
    *g = dir;
    return;
  }
  // inside: steepest ascent is along the axis closest to a face
  int axis = 0;
  if (q(1) > q(axis)) axis = 1;
  if (q(2) > q(axis)) axis = 2;
  Vec3 dir = Vec3::Zero();
  dir(axis) = p(axis) < 0.0 ? -1.0 : 1.0;
  *g = dir;
}

void torus_local(const Vec3& p, Real ring, Real tube, Real* f, Vec3* g) {
  Real rho = std::sqrt(p.x() * p.x() + p.y() * p.y());
  Real cx = 1.0, cy = 0.0;  // radial direction; fixed convention on the axis
  if (rho > 1e-300) {
    cx = p.x() / rho;
    cy = p.y() / rho;
  }
  const Real radial = rho - ring;
  const Real d = std::sqrt(radial * radial + p.z() * p.z());
  *f = d - tube;
  if (d > 1e-300) {
    *g = Vec3(cx * radial / d, cy * radial / d, p.z() / d);
  } else {
    *g = Vec3(0.0, 0.0, 1.0);  // exactly on the ring's center circle
  }
}

void eval_primitive(const ScenePrimitive& prim, const Vec3& p_world, Real* f,
                    Vec3* g) {
  const Vec3 p = prim.rotation.transpose() * (p_world - prim.center);
  Vec3 g_local;
  switch (prim.kind) {
    case PrimitiveKind::kSphere: {
      const Real len = p.norm();
      *f = len - prim.size.x();
      g_local = len > 1e-300 ? Vec3(p / len) : Vec3(0.0, 0.0, 1.0);
      break;
    }
    case PrimitiveKind::kBox:
      box_local(p, prim.size, f, &g_local);
      break;
    case PrimitiveKind::kTorus:
      torus_local(p, prim.size.x(), prim.size.y(), f, &g_local);
      break;
  }
  if (g) *g = prim.rotation * g_local;
}

}  // namespace

Real primitive_sdf(const ScenePrimitive& primitive, const Vec3& p) {
  Real f = 0.0;
  eval_primitive(primitive, p, &f, nullptr);
  return f;
}

Vec3 primitive_gradient(const ScenePrimitive& primitive, const Vec3& p) {
  Real f = 0.0;
  Vec3 g;
  eval_primitive(primitive, p, &f, &g);
  return g;
}

Scene Scene::foreground() const {
  if (n_foreground < 0) return *this;
  if (n_foreground == 0 || n_foreground > static_cast<int>(primitives.size()))
    throw std::invalid_argument("Scene::foreground: n_foreground out of range");
  Scene fg = *this;
  fg.primitives.resize(static_cast<std::size_t>(n_foreground));
  fg.n_foreground = -1;
  return fg;
}

SceneSample scene_sdf(const Scene& scene, const Vec3& p) {
  if (scene.primitives.empty())
    throw std::invalid_argument("scene_sdf: scene has no primitives");
  SceneSample best;
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    Real f = 0.0;
    Vec3 g;
    eval_primitive(scene.primitives[i], p, &f, &g);
    if (best.primitive < 0 || f < best.sdf) {
      best.sdf = f;
      best.normal = g;
      best.primitive = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace neusurf
