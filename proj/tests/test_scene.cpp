#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "neusurf/scene/dataset.hpp"
#include "neusurf/scene/render_scene.hpp"
#include "neusurf/scene/scene_text.hpp"
#include "support/test_utils.hpp"

using namespace neusurf;
using neusurf::testing::TempDir;

namespace {

// Analytic ray-sphere intersection: smallest t >= 0 with |o + t d - c| = r.
bool ray_sphere(const Vec3& o, const Vec3& d, const Vec3& c, Real r, Real* t) {
  const Vec3 oc = o - c;
  const Real b = oc.dot(d);
  const Real disc = b * b - (oc.squaredNorm() - r * r);
  if (disc < 0.0) return false;
  const Real t0 = -b - std::sqrt(disc);
  const Real t1 = -b + std::sqrt(disc);
  if (t1 < 0.0) return false;
  *t = t0 >= 0.0 ? t0 : t1;
  return true;
}

// Slab test against an axis-aligned box (no rotation), entry parameter only.
bool ray_aabox(const Vec3& o, const Vec3& d, const Vec3& c, const Vec3& half,
               Real* t) {
  Real t_enter = -std::numeric_limits<Real>::infinity();
  Real t_exit = std::numeric_limits<Real>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d(a) == 0.0) {
      if (std::abs(o(a) - c(a)) > half(a)) return false;
      continue;
    }
    Real lo = (c(a) - half(a) - o(a)) / d(a);
    Real hi = (c(a) + half(a) - o(a)) / d(a);
    if (lo > hi) std::swap(lo, hi);
    t_enter = std::max(t_enter, lo);
    t_exit = std::min(t_exit, hi);
  }
  if (t_enter > t_exit || t_exit < 0.0) return false;
  *t = t_enter >= 0.0 ? t_enter : t_exit;
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

DatasetConfig small_rig(int n_views, int size) {
  DatasetConfig cfg;
  cfg.n_views = n_views;
  cfg.width = size;
  cfg.height = size;
  return cfg;
}

}  // namespace

TEST_CASE("sphere tracing matches analytic intersections") {
  const Scene scene = make_fixture("sphere");
  const Camera camera =
      Camera::look_at(Vec3(0, 0, 2), Vec3::Zero(), Vec3(0, 1, 0), 33, 33, 46.0);

  SUBCASE("center pixel hits the near pole at depth 1.5") {
    const Ray ray = ray_through(camera, 16.5, 16.5);
    REQUIRE(ray.hits_domain);
    const TraceResult hit = sphere_trace(scene, ray.origin, ray.dir, ray.t_near, ray.t_far);
    REQUIRE(hit.hit);
    CHECK(std::abs(hit.t - 1.5) < 1e-4);
    CHECK((hit.point - Vec3(0, 0, 0.5)).norm() < 1e-4);
    CHECK((hit.normal - Vec3(0, 0, 1)).norm() < 1e-4);
    CHECK(hit.primitive == 0);
  }

  SUBCASE("every hit pixel agrees with the quadratic solution") {
    int hits = 0;
    for (int iy = 0; iy < camera.height; iy += 2) {
      for (int ix = 0; ix < camera.width; ix += 2) {
        const Ray ray = ray_through(camera, ix + 0.5, iy + 0.5);
        if (!ray.hits_domain) continue;
        const TraceResult traced =
            sphere_trace(scene, ray.origin, ray.dir, ray.t_near, ray.t_far);
        Real exact = 0.0;
        const bool wants = ray_sphere(ray.origin, ray.dir, Vec3::Zero(), 0.5, &exact);
        CHECK(traced.hit == wants);
        if (traced.hit && wants) {
          CHECK(std::abs(traced.t - exact) < 1e-4);
          ++hits;
        }
      }
    }
    CHECK(hits > 20);  // the sphere fills a decent part of this view
  }

  SUBCASE("an axis-aligned box traces to the slab-test depth") {
    Scene box_scene;
    box_scene.primitives.push_back(
        make_box(Vec3(0.1, -0.05, 0.0), Vec3(0.3, 0.25, 0.2), Vec3::Ones()));
    int hits = 0;
    for (int iy = 0; iy < camera.height; iy += 2) {
      for (int ix = 0; ix < camera.width; ix += 2) {
        const Ray ray = ray_through(camera, ix + 0.5, iy + 0.5);
        if (!ray.hits_domain) continue;
        const TraceResult traced =
            sphere_trace(box_scene, ray.origin, ray.dir, ray.t_near, ray.t_far);
        Real exact = 0.0;
        const bool wants = ray_aabox(ray.origin, ray.dir, Vec3(0.1, -0.05, 0.0),
                                     Vec3(0.3, 0.25, 0.2), &exact);
        CHECK(traced.hit == wants);
        if (traced.hit && wants) {
          CHECK(std::abs(traced.t - exact) < 1e-4);
          ++hits;
        }
      }
    }
    CHECK(hits > 20);
  }

  SUBCASE("rays that miss everything report a miss") {
    // aim well away from the scene: a ray through the image corner
    const Ray ray = ray_through(camera, 0.5, 0.5);
    if (ray.hits_domain) {
      const TraceResult miss =
          sphere_trace(scene, ray.origin, ray.dir, ray.t_near, ray.t_far);
      CHECK_FALSE(miss.hit);
    }
  }
}

TEST_CASE("Lambertian shading: pinned gains and saturation") {
  Scene scene = make_fixture("sphere");
  const Vec3 albedo(0.6, 0.4, 0.2);

  const Vec3 lit = shade_lambert(scene, albedo, scene.light_dir);
  CHECK((lit - albedo * std::min(1.0, scene.ambient + 1.0)).norm() == 0.0);
  CHECK(lit == albedo);  // 0.1 + 1.0 saturates at 1

  // any direction orthogonal to the light gets ambient only
  const Vec3 ortho = scene.light_dir.cross(Vec3(0, 0, 1)).normalized();
  CHECK((shade_lambert(scene, albedo, ortho) - 0.1 * albedo).norm() < 1e-15);

  // facing away from the light also gets ambient only
  CHECK((shade_lambert(scene, albedo, -scene.light_dir) - 0.1 * albedo).norm() < 1e-15);

  scene.ambient = 0.4;
  const Vec3 partial = shade_lambert(scene, albedo, scene.light_dir);
  CHECK(partial == albedo);  // 0.4 + 1.0 still saturates
}

TEST_CASE("rendered views: silhouette is exactly the depth-hit mask") {
  const Scene scene = make_fixture("composite");
  const Camera camera =
      Camera::look_at(Vec3(1.2, 0.6, 0.9), Vec3::Zero(), Vec3(0, 1, 0), 48, 48, 50.0);
  const ViewRender view = render_view(scene, camera);

  int hit_pixels = 0;
  for (int iy = 0; iy < camera.height; ++iy) {
    for (int ix = 0; ix < camera.width; ++ix) {
      const Eigen::Index p = view.color.index(ix, iy);
      const Real m = view.mask.pixels(0, p);
      CHECK((m == 0.0 || m == 1.0));
      CHECK((m == 1.0) == (view.depth(p) > 0.0));
      if (m == 0.0) CHECK(view.color.at(ix, iy) == scene.background);
      if (m == 1.0) ++hit_pixels;
    }
  }
  CHECK(hit_pixels > 100);
  CHECK(hit_pixels < camera.width * camera.height);
}

TEST_CASE("cluttered fixture: shards render but stay out of the mask") {
  const Scene scene = make_fixture("cluttered");
  REQUIRE(scene.n_foreground == 1);
  REQUIRE(scene.primitives.size() == 7);

  const DatasetConfig cfg = small_rig(6, 48);
  const Dataset data = generate_dataset(scene, cfg);

  const Scene fg = scene.foreground();
  CHECK(fg.primitives.size() == 1);

  int shard_pixels = 0;
  int object_pixels = 0;
  for (std::size_t v = 0; v < data.cameras.size(); ++v) {
    // the saved mask must be exactly the foreground silhouette
    const ViewRender object_view = render_view(fg, data.cameras[v]);
    CHECK(data.masks[v].pixels == object_view.mask.pixels);

    const ViewRender full = render_view(scene, data.cameras[v]);
    for (int iy = 0; iy < cfg.height; ++iy) {
      for (int ix = 0; ix < cfg.width; ++ix) {
        const Eigen::Index p = full.color.index(ix, iy);
        const bool full_hit = full.depth(p) > 0.0;
        const bool in_mask = data.masks[v].pixels(0, p) == 1.0;
        if (full_hit && !in_mask && full.color.at(ix, iy) != scene.background)
          ++shard_pixels;  // visible clutter, excluded from the silhouette
        if (in_mask) ++object_pixels;
      }
    }
  }
  CHECK(shard_pixels > 50);    // the clutter is actually visible
  CHECK(object_pixels > 500);  // and so is the object
}

TEST_CASE("every fixture stays inside the unit sphere") {
  for (const char* name : {"sphere", "composite", "cluttered"}) {
    const Scene scene = make_fixture(name);
    for (const ScenePrimitive& p : scene.primitives) {
      Real reach = 0.0;
      switch (p.kind) {
        case PrimitiveKind::kSphere: reach = p.size(0); break;
        case PrimitiveKind::kBox: reach = p.size.norm(); break;
        case PrimitiveKind::kTorus: reach = p.size(0) + p.size(1); break;
      }
      CHECK(p.center.norm() + reach < 1.0);
    }
  }
  CHECK_THROWS_AS(make_fixture("teapot"), std::invalid_argument);
}

TEST_CASE("ring rig geometry") {
  DatasetConfig cfg = small_rig(8, 16);
  const std::vector<Camera> cams = ring_cameras(cfg);
  REQUIRE(cams.size() == 8);

  for (const Camera& c : cams) {
    const Vec3 to_target = cfg.target - c.position;
    CHECK(std::abs(to_target.norm() - cfg.radius) < 1e-12);
    // aimed straight at the target
    CHECK(to_target.normalized().dot(c.optical_axis()) > 1.0 - 1e-12);
    // requested elevation above the horizontal plane
    const Real sin_elev = (c.position - cfg.target).dot(cfg.up) / cfg.radius;
    CHECK(std::abs(std::asin(sin_elev) - cfg.elevation) < 1e-12);
  }

  // evenly spaced azimuths: consecutive horizontal angles differ by 2 pi / K
  for (std::size_t k = 0; k + 1 < cams.size(); ++k) {
    Vec3 a = cams[k].position - cfg.target;
    Vec3 b = cams[k + 1].position - cfg.target;
    a(1) = 0.0;
    b(1) = 0.0;
    const Real angle = std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
    CHECK(std::abs(angle - 2.0 * 3.141592653589793 / 8.0) < 1e-9);
  }

  SUBCASE("jitter is seeded and deterministic") {
    cfg.elevation_jitter = 0.05;
    const std::vector<Camera> j1 = ring_cameras(cfg);
    const std::vector<Camera> j2 = ring_cameras(cfg);
    cfg.seed = 2;
    const std::vector<Camera> j3 = ring_cameras(cfg);
    bool all_same = true, any_differs = false;
    for (std::size_t k = 0; k < j1.size(); ++k) {
      all_same = all_same && j1[k].position == j2[k].position;
      any_differs = any_differs || j1[k].position != j3[k].position;
    }
    CHECK(all_same);
    CHECK(any_differs);
  }

  SUBCASE("validation") {
    cfg.n_views = 2;
    CHECK_THROWS_AS(ring_cameras(cfg), std::invalid_argument);
    cfg.n_views = 8;
    cfg.radius = 0.0;
    CHECK_THROWS_AS(ring_cameras(cfg), std::invalid_argument);
  }
}

TEST_CASE("camera file round-trip is exact") {
  DatasetConfig cfg = small_rig(5, 20);
  cfg.elevation_jitter = 0.03;
  const std::vector<Camera> cams = ring_cameras(cfg);

  TempDir dir("cameras");
  const std::string path = dir.str("cameras.txt");
  save_cameras(cams, path);
  const std::vector<Camera> back = load_cameras(path);
  REQUIRE(back.size() == cams.size());
  for (std::size_t i = 0; i < cams.size(); ++i) {
    CHECK(back[i].width == cams[i].width);
    CHECK(back[i].height == cams[i].height);
    CHECK(back[i].fx == cams[i].fx);
    CHECK(back[i].fy == cams[i].fy);
    CHECK(back[i].cx == cams[i].cx);
    CHECK(back[i].cy == cams[i].cy);
    CHECK(back[i].rotation == cams[i].rotation);
    CHECK(back[i].position == cams[i].position);
  }

  SUBCASE("malformed files are rejected") {
    const std::string bad = dir.str("bad.txt");
    std::ofstream(bad) << "cameras 7\n";
    CHECK_THROWS_AS(load_cameras(bad), std::runtime_error);
    std::ofstream(bad) << "cameras 1\ncount 1\nview 0\nsize 4 4\nintrinsics 1 1 2 2\npose 1 0 0 0\n";
    CHECK_THROWS_AS(load_cameras(bad), std::runtime_error);
    CHECK_THROWS_AS(load_cameras(dir.str("absent.txt")), std::runtime_error);
  }
}

TEST_CASE("dataset round-trip: bytes stable, cameras exact, images 8-bit faithful") {
  const Scene scene = make_fixture("sphere");
  const DatasetConfig cfg = small_rig(4, 24);
  const Dataset data = generate_dataset(scene, cfg);
  REQUIRE(data.images.size() == 4);
  REQUIRE(data.masks.size() == 4);
  REQUIRE(data.depths.size() == 4);

  TempDir dir("dataset");
  const std::string d1 = dir.str("first");
  const DatasetManifest manifest = save_dataset(data, d1, /*with_depth=*/true);
  CHECK(manifest.n_views == 4);
  CHECK(manifest.width == 24);
  CHECK(manifest.depth_files.size() == 4);

  const Dataset loaded = load_dataset(d1);
  REQUIRE(loaded.cameras.size() == data.cameras.size());
  for (std::size_t i = 0; i < data.cameras.size(); ++i) {
    CHECK(loaded.cameras[i].rotation == data.cameras[i].rotation);
    CHECK(loaded.cameras[i].position == data.cameras[i].position);
    CHECK(loaded.cameras[i].fx == data.cameras[i].fx);
  }
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    CHECK((loaded.images[i].pixels - data.images[i].pixels).cwiseAbs().maxCoeff() <=
          0.5 / 255.0 + 1e-12);
    CHECK(loaded.masks[i].pixels == data.masks[i].pixels);  // 0/1 survives PNG exactly
    // depth went through float32
    for (Eigen::Index p = 0; p < loaded.depths[i].size(); ++p)
      CHECK(loaded.depths[i](p) == static_cast<double>(static_cast<float>(data.depths[i](p))));
  }

  // saving the loaded dataset reproduces the image files byte for byte
  const std::string d2 = dir.str("second");
  save_dataset(loaded, d2, /*with_depth=*/true);
  namespace fs = std::filesystem;
  for (const std::string& f : manifest.image_files)
    CHECK(slurp((fs::path(d1) / f).string()) == slurp((fs::path(d2) / f).string()));
  for (const std::string& f : manifest.mask_files)
    CHECK(slurp((fs::path(d1) / f).string()) == slurp((fs::path(d2) / f).string()));

  SUBCASE("regenerating is bit-identical") {
    const Dataset again = generate_dataset(scene, cfg);
    for (std::size_t i = 0; i < data.images.size(); ++i) {
      CHECK(again.images[i].pixels == data.images[i].pixels);
      CHECK(again.masks[i].pixels == data.masks[i].pixels);
    }
    const std::string d3 = dir.str("third");
    save_dataset(again, d3, /*with_depth=*/true);
    for (const std::string& f : manifest.image_files)
      CHECK(slurp((fs::path(d1) / f).string()) == slurp((fs::path(d3) / f).string()));
  }

  SUBCASE("loading a missing directory fails loudly") {
    CHECK_THROWS_AS(load_dataset(dir.str("nowhere")), std::runtime_error);
  }

  SUBCASE("manifest counts must line up") {
    Dataset broken = data;
    broken.masks.pop_back();
    CHECK_THROWS_AS(save_dataset(broken, dir.str("broken")), std::invalid_argument);
  }
}

TEST_CASE("hit points reproject into the silhouettes of the views that see them") {
  const Scene scene = make_fixture("sphere");
  const DatasetConfig cfg = small_rig(8, 32);
  const Dataset data = generate_dataset(scene, cfg);

  int probes = 0, good = 0;
  const Camera& cam0 = data.cameras[0];
  for (int iy = 0; iy < cfg.height; ++iy) {
    for (int ix = 0; ix < cfg.width; ++ix) {
      const Eigen::Index p = data.masks[0].index(ix, iy);
      if (data.masks[0].pixels(0, p) != 1.0) continue;
      const Ray ray = ray_through(cam0, ix + 0.5, iy + 0.5);
      const Vec3 point = ray.origin + data.depths[0](p) * ray.dir;

      for (std::size_t v = 1; v < data.cameras.size(); ++v) {
        const Camera& cam = data.cameras[v];
        Real u = 0.0, w = 0.0;
        if (!cam.project(point, &u, &w)) continue;
        const int px = static_cast<int>(std::floor(u));
        const int py = static_cast<int>(std::floor(w));
        if (px < 0 || py < 0 || px >= cam.width || py >= cam.height) continue;

        // occlusion check: trace toward the point; if something nearer
        // intercepts the ray, this view does not see the probe
        const Vec3 dir = (point - cam.position).normalized();
        const Real dist = (point - cam.position).norm();
        const TraceResult block = sphere_trace(scene, cam.position, dir, 1e-4, dist + 1.0);
        if (!block.hit || block.t < dist - 1e-3) continue;

        ++probes;
        // pixel-center rasterization can miss a limb point that projects
        // into a pixel square whose center-ray passes the surface, so the
        // probe accepts the 3x3 neighborhood (the same guard the visual
        // hull uses)
        bool in_mask = false;
        for (int dy = -1; dy <= 1 && !in_mask; ++dy) {
          for (int dx = -1; dx <= 1 && !in_mask; ++dx) {
            const int nx = px + dx, ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= cam.width || ny >= cam.height) continue;
            in_mask = data.masks[v].pixels(0, data.masks[v].index(nx, ny)) == 1.0;
          }
        }
        if (in_mask) ++good;
      }
    }
  }
  REQUIRE(probes > 500);
  CHECK(static_cast<double>(good) >= 0.99 * static_cast<double>(probes));
}

TEST_CASE("scene text: fixpoint, fixtures, and rejection of malformed input") {
  for (const char* name : {"sphere", "composite", "cluttered"}) {
    const Scene scene = make_fixture(name);
    const std::string text = format_scene(scene);
    const Scene back = parse_scene(text);
    CHECK(format_scene(back) == text);  // fixpoint after one round
    REQUIRE(back.primitives.size() == scene.primitives.size());
    CHECK(back.n_foreground == scene.n_foreground);
    CHECK(back.light_dir == scene.light_dir);
    CHECK(back.background == scene.background);
    for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
      CHECK(back.primitives[i].kind == scene.primitives[i].kind);
      CHECK(back.primitives[i].center == scene.primitives[i].center);
      CHECK(back.primitives[i].size == scene.primitives[i].size);
      CHECK(back.primitives[i].rotation == scene.primitives[i].rotation);
      CHECK(back.primitives[i].albedo == scene.primitives[i].albedo);
    }
  }

  SUBCASE("the shipped fixture files are exactly the built-in definitions") {
    namespace fs = std::filesystem;
    for (const char* name : {"sphere", "composite", "cluttered"}) {
      const fs::path path =
          fs::path(NEUSURF_SOURCE_ROOT) / "fixtures" / (std::string(name) + ".scene");
      CHECK(slurp(path.string()) == format_scene(make_fixture(name)));
    }
  }

  SUBCASE("file round-trip") {
    TempDir dir("scenetext");
    const std::string path = dir.str("cluttered.scene");
    const Scene scene = make_fixture("cluttered");
    save_scene(scene, path);
    const Scene back = load_scene(path);
    CHECK(format_scene(back) == format_scene(scene));
    CHECK_THROWS_AS(load_scene(dir.str("absent.scene")), std::runtime_error);
  }

  SUBCASE("comments and axis-angle rotations parse") {
    const Scene s = parse_scene(
        "# a comment\n"
        "scene 1\n"
        "background 0 0 0\n"
        "light 0 1 0  # toward +y\n"
        "box 0 0 0  0.2 0.2 0.2  1 1 1  0 0 1 0.7853981633974483\n");
    REQUIRE(s.primitives.size() == 1);
    // 45 degrees about z
    CHECK(std::abs(s.primitives[0].rotation(0, 0) - std::sqrt(0.5)) < 1e-12);
    CHECK(s.light_dir == Vec3(0, 1, 0));
  }

  SUBCASE("malformed inputs throw") {
    CHECK_THROWS_AS(parse_scene(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_scene("scene 2\nsphere 0 0 0 0.5 1 1 1\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_scene("scene 1\n"), std::invalid_argument);  // no primitives
    CHECK_THROWS_AS(parse_scene("scene 1\ncube 0 0 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scene("scene 1\nsphere 0 0 0 0.5 1 1\n"),
                    std::invalid_argument);  // short a number
    CHECK_THROWS_AS(parse_scene("scene 1\nsphere 0 0 0 -0.5 1 1 1\n"),
                    std::invalid_argument);  // validator rejects the radius
    CHECK_THROWS_AS(parse_scene("scene 1\nforeground 3\nsphere 0 0 0 0.5 1 1 1\n"),
                    std::invalid_argument);  // foreground exceeds count
    CHECK_THROWS_AS(
        parse_scene("scene 1\nbox 0 0 0 .1 .1 .1 1 1 1  1 0 0\n"),
        std::invalid_argument);  // rotation tail must be 4 or 9 numbers
    CHECK_THROWS_AS(
        parse_scene("scene 1\nbox 0 0 0 .1 .1 .1 1 1 1  0 0 0 0.5\n"),
        std::invalid_argument);  // zero rotation axis
  }
}
