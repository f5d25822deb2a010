#include "neusurf/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "neusurf/refine/kdtree.hpp"

namespace neusurf {

namespace {

constexpr Real kPi = 3.141592653589793238462643383279502884;

// Cumulative triangle areas; total in back().
std::vector<Real> cumulative_areas(const TriangleMesh& mesh) {
  std::vector<Real> cum(static_cast<std::size_t>(mesh.triangle_count()));
  Real acc = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Vec3 a = mesh.vertices.col(mesh.triangles(0, t));
    const Vec3 b = mesh.vertices.col(mesh.triangles(1, t));
    const Vec3 c = mesh.vertices.col(mesh.triangles(2, t));
    acc += 0.5 * (b - a).cross(c - a).norm();
    cum[static_cast<std::size_t>(t)] = acc;
  }
  return cum;
}

// Mean nearest-neighbor distance from each column of `from` to the cloud
// `to` (plain or squared Euclidean), accumulated in column order.
Real directional_mean(const Mat& from, const KdTree3& to, bool squared) {
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < from.cols(); ++i) {
    const Real d2 = to.nearest(from.col(i)).second;
    acc += squared ? d2 : std::sqrt(d2);
  }
  return acc / static_cast<Real>(from.cols());
}

}  // namespace

Mat sample_mesh_points(const TriangleMesh& mesh, Eigen::Index count, Rng& rng) {
  mesh.validate();
  if (mesh.triangle_count() == 0)
    throw std::invalid_argument("sample_mesh_points: mesh has no faces");
  if (count < 1) throw std::invalid_argument("sample_mesh_points: count must be >= 1");

  const std::vector<Real> cum = cumulative_areas(mesh);
  const Real total = cum.back();
  if (!(total > 0.0))
    throw std::invalid_argument("sample_mesh_points: zero-area mesh");

  Mat points(3, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Real pick = rng.uniform() * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), pick);
    const int t = static_cast<int>(std::min<std::ptrdiff_t>(
        it - cum.begin(), static_cast<std::ptrdiff_t>(cum.size()) - 1));

    Real u = rng.uniform();
    Real v = rng.uniform();
    if (u + v > 1.0) {  // fold the unit square onto the triangle
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Vec3 a = mesh.vertices.col(mesh.triangles(0, t));
    const Vec3 b = mesh.vertices.col(mesh.triangles(1, t));
    const Vec3 c = mesh.vertices.col(mesh.triangles(2, t));
    points.col(i) = a + u * (b - a) + v * (c - a);
  }
  return points;
}

Real chamfer_eval(const Mat& pred, const Mat& ref, bool squared) {
  if (pred.rows() != 3 || ref.rows() != 3)
    throw std::invalid_argument("chamfer_eval: point clouds must be 3 x n");
  if (pred.cols() == 0 || ref.cols() == 0)
    throw std::invalid_argument("chamfer_eval: empty point cloud");
  const KdTree3 pred_tree(pred);
  const KdTree3 ref_tree(ref);
  return 0.5 * (directional_mean(pred, ref_tree, squared) +
                directional_mean(ref, pred_tree, squared));
}

HullFilter visual_hull_filter(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
                              int dilation) {
  mesh.validate();
  silhouettes.validate();
  if (silhouettes.views.empty())
    throw std::invalid_argument("visual_hull_filter: need at least one silhouette");
  if (dilation < 0)
    throw std::invalid_argument("visual_hull_filter: dilation must be >= 0");

  // Precompute binary masks once per view.
  std::vector<std::vector<std::uint8_t>> on(silhouettes.views.size());
  for (std::size_t k = 0; k < silhouettes.views.size(); ++k)
    on[k] = image_to_mask(silhouettes.views[k].mask);

  // A vertex is outside the hull if some view sees it land on an all-off
  // neighborhood.  Views that do not see the vertex (behind the camera or
  // out of frame) cannot carve it.
  std::vector<char> outside(static_cast<std::size_t>(mesh.vertex_count()), 0);
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3 p = mesh.vertices.col(i);
    for (std::size_t k = 0; k < silhouettes.views.size() && !outside[i]; ++k) {
      const Camera& cam = silhouettes.views[k].camera;
      Real u = 0, v = 0;
      if (!cam.project(p, &u, &v)) continue;
      const int px = static_cast<int>(std::floor(u));
      const int py = static_cast<int>(std::floor(v));
      if (px < 0 || px >= cam.width || py < 0 || py >= cam.height) continue;
      bool hit = false;
      for (int dy = -dilation; dy <= dilation && !hit; ++dy)
        for (int dx = -dilation; dx <= dilation && !hit; ++dx) {
          const int x = px + dx, y = py + dy;
          if (x < 0 || x >= cam.width || y < 0 || y >= cam.height) continue;
          hit = on[k][static_cast<std::size_t>(
                    silhouettes.views[k].mask.index(x, y))] != 0;
        }
      if (!hit) outside[static_cast<std::size_t>(i)] = 1;
    }
  }

  // Keep faces whose three vertices all stayed inside; renumber the
  // surviving vertices in their original order.
  std::vector<int> kept_faces;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const bool in = !outside[static_cast<std::size_t>(mesh.triangles(0, t))] &&
                    !outside[static_cast<std::size_t>(mesh.triangles(1, t))] &&
                    !outside[static_cast<std::size_t>(mesh.triangles(2, t))];
    if (in) kept_faces.push_back(t);
  }

  std::vector<int> new_index(static_cast<std::size_t>(mesh.vertex_count()), -1);
  int n_kept_vertices = 0;
  for (int t : kept_faces)
    for (int k = 0; k < 3; ++k) {
      int& slot = new_index[static_cast<std::size_t>(mesh.triangles(k, t))];
      if (slot < 0) slot = 0;  // mark used
    }
  for (std::size_t i = 0; i < new_index.size(); ++i)
    if (new_index[i] == 0) new_index[i] = n_kept_vertices++;

  HullFilter result;
  result.removed_faces = mesh.triangle_count() - static_cast<int>(kept_faces.size());
  result.inside.vertices.resize(3, n_kept_vertices);
  if (mesh.has_colors()) result.inside.colors.resize(3, n_kept_vertices);
  if (mesh.has_normals()) result.inside.normals.resize(3, n_kept_vertices);
  for (std::size_t i = 0; i < new_index.size(); ++i) {
    if (new_index[i] < 0) continue;
    const Eigen::Index src = static_cast<Eigen::Index>(i), dst = new_index[i];
    result.inside.vertices.col(dst) = mesh.vertices.col(src);
    if (mesh.has_colors()) result.inside.colors.col(dst) = mesh.colors.col(src);
    if (mesh.has_normals()) result.inside.normals.col(dst) = mesh.normals.col(src);
  }
  result.inside.triangles.resize(3, static_cast<Eigen::Index>(kept_faces.size()));
  for (std::size_t j = 0; j < kept_faces.size(); ++j)
    for (int k = 0; k < 3; ++k)
      result.inside.triangles(k, static_cast<Eigen::Index>(j)) =
          new_index[static_cast<std::size_t>(mesh.triangles(k, kept_faces[j]))];
  return result;
}

Real mesh_noise_ratio(const TriangleMesh& mesh, const SilhouetteSet& silhouettes,
                      int dilation) {
  if (mesh.triangle_count() == 0)
    throw std::invalid_argument("mesh_noise_ratio: mesh has no faces");
  const HullFilter filtered = visual_hull_filter(mesh, silhouettes, dilation);
  return 100.0 * static_cast<Real>(filtered.removed_faces) /
         static_cast<Real>(mesh.triangle_count());
}

Real psnr(const Image& img, const Image& ref) {
  if (img.width != ref.width || img.height != ref.height)
    throw std::invalid_argument("psnr: image sizes differ");
  if (img.pixels.size() == 0) throw std::invalid_argument("psnr: empty image");
  const Real mse = (img.pixels - ref.pixels).squaredNorm() /
                   static_cast<Real>(img.pixels.size());
  if (mse == 0.0) return std::numeric_limits<Real>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

Real primitive_area(const ScenePrimitive& p) {
  switch (p.kind) {
    case PrimitiveKind::kSphere:
      return 4.0 * kPi * p.size.x() * p.size.x();
    case PrimitiveKind::kBox:
      return 8.0 * (p.size.x() * p.size.y() + p.size.y() * p.size.z() +
                    p.size.z() * p.size.x());
    case PrimitiveKind::kTorus:
      return 4.0 * kPi * kPi * p.size.x() * p.size.y();
  }
  throw std::logic_error("primitive_area: unknown kind");
}

Vec3 sample_primitive_surface(const ScenePrimitive& p, Rng& rng) {
  Vec3 local = Vec3::Zero();
  switch (p.kind) {
    case PrimitiveKind::kSphere: {
      Vec3 dir(rng.normal(), rng.normal(), rng.normal());
      while (dir.norm() < 1e-12) dir = Vec3(rng.normal(), rng.normal(), rng.normal());
      local = p.size.x() * dir.normalized();
      break;
    }
    case PrimitiveKind::kBox: {
      const Vec3 h = p.size;
      // pick one of the six faces by area, then a uniform point on it
      const Real axy = h.x() * h.y(), ayz = h.y() * h.z(), azx = h.z() * h.x();
      const Real total = 2.0 * (axy + ayz + azx);
      Real pick = rng.uniform() * total;
      const Real su = rng.uniform(-1.0, 1.0), sv = rng.uniform(-1.0, 1.0);
      if (pick < 2.0 * ayz) {
        local = Vec3(pick < ayz ? h.x() : -h.x(), su * h.y(), sv * h.z());
      } else if ((pick -= 2.0 * ayz) < 2.0 * azx) {
        local = Vec3(su * h.x(), pick < azx ? h.y() : -h.y(), sv * h.z());
      } else {
        pick -= 2.0 * azx;
        local = Vec3(su * h.x(), sv * h.y(), pick < axy ? h.z() : -h.z());
      }
      break;
    }
    case PrimitiveKind::kTorus: {
      const Real ring = p.size.x(), tube = p.size.y();
      const Real theta = rng.uniform(0.0, 2.0 * kPi);
      // tube angle density is proportional to the local ring radius
      Real phi = 0.0;
      for (;;) {
        phi = rng.uniform(0.0, 2.0 * kPi);
        const Real accept = (ring + tube * std::cos(phi)) / (ring + tube);
        if (rng.uniform() <= accept) break;
      }
      const Real rho = ring + tube * std::cos(phi);
      local = Vec3(rho * std::cos(theta), rho * std::sin(theta), tube * std::sin(phi));
      break;
    }
  }
  return p.center + p.rotation * local;
}

}  // namespace

Mat sample_surface(const Scene& scene, Eigen::Index count, Rng& rng) {
  if (scene.primitives.empty())
    throw std::invalid_argument("sample_surface: empty scene");
  if (count < 1) throw std::invalid_argument("sample_surface: count must be >= 1");

  std::vector<Real> cum(scene.primitives.size());
  Real acc = 0.0;
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    acc += primitive_area(scene.primitives[i]);
    cum[i] = acc;
  }

  Mat points(3, count);
  Eigen::Index placed = 0;
  // Points on one primitive but swallowed by another are rejected; the union
  // surface is what remains.
  for (std::int64_t attempts = 0; placed < count; ++attempts) {
    if (attempts > 1000ll * count + 10000)
      throw std::runtime_error(
          "sample_surface: rejection starved (primitives nearly swallowed?)");
    const Real pick = rng.uniform() * cum.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), pick);
    const std::size_t which = std::min(static_cast<std::size_t>(it - cum.begin()),
                                       scene.primitives.size() - 1);
    const Vec3 p = sample_primitive_surface(scene.primitives[which], rng);
    if (scene_sdf(scene, p).sdf > -1e-9) points.col(placed++) = p;
  }
  return points;
}

}  // namespace neusurf
