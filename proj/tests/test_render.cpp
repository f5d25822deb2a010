#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "neusurf/render/camera.hpp"
#include "neusurf/render/image.hpp"
#include "neusurf/render/kernels.hpp"
#include "neusurf/render/sampling.hpp"
#include "support/test_utils.hpp"

using namespace neusurf;
using neusurf::testing::chi_square_pvalue;
using neusurf::testing::gradcheck;
using neusurf::testing::TempDir;

namespace {

// Straight-line recomputation of the opacity kernel, kept deliberately
// separate from the library code so the test would catch a regression in
// either the formula or the evaluation order.
double alpha_oracle(double f_i, double f_next, double s) {
  const double phi_i = 1.0 / (1.0 + std::exp(-(s * f_i)));
  const double phi_next = 1.0 / (1.0 + std::exp(-(s * f_next)));
  const double den = phi_i < 1e-7 ? 1e-7 : phi_i;
  const double a = (phi_i - phi_next) / den;
  return a < 0.0 ? 0.0 : a;
}

Mat random_mat(Rng& rng, int rows, int cols, double lo = 0.0, double hi = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

// March `t += f(x)` from the ray's near bound; returns the hit parameter or
// a negative value if the march leaves the interval.
template <typename Sdf>
double sphere_trace(const Ray& ray, const Sdf& f) {
  double t = ray.t_near;
  for (int it = 0; it < 200; ++it) {
    const double d = f(Vec3(ray.origin + t * ray.dir));
    if (std::abs(d) < 1e-12) return t;
    t += d;
    if (t > ray.t_far + 1.0) return -1.0;
  }
  return t;
}

}  // namespace

TEST_CASE("stratified samples hit stratum midpoints with jitter off") {
  const Vec t = stratified_samples(0.0, 1.0, 4, false, nullptr);
  REQUIRE(t.size() == 4);
  CHECK(t(0) == 0.125);
  CHECK(t(1) == 0.375);
  CHECK(t(2) == 0.625);
  CHECK(t(3) == 0.875);

  // shifted interval
  const Vec u = stratified_samples(2.0, 4.0, 5, false, nullptr);
  for (int i = 0; i < 5; ++i) CHECK(u(i) == doctest::Approx(2.0 + (i + 0.5) * 0.4).epsilon(1e-15));

  CHECK_THROWS(stratified_samples(0.0, 1.0, 1, false, nullptr));
  CHECK_THROWS(stratified_samples(1.0, 1.0, 4, false, nullptr));
  CHECK_THROWS(stratified_samples(0.0, 1.0, 4, true, nullptr));
}

TEST_CASE("jittered stratified samples stay in their strata and average to midpoints") {
  Rng rng(314159);
  const int n = 4;
  const int trials = 10000;
  Vec sum = Vec::Zero(n);
  for (int trial = 0; trial < trials; ++trial) {
    const Vec t = stratified_samples(0.0, 1.0, n, true, &rng);
    for (int i = 0; i < n; ++i) {
      CHECK(t(i) >= static_cast<double>(i) / n);
      CHECK(t(i) <= static_cast<double>(i + 1) / n);
      sum(i) += t(i);
    }
  }
  // mean of `trials` uniforms on a stratum of width w: sd = w / sqrt(12 T)
  const double w = 1.0 / n;
  const double sd = w / std::sqrt(12.0 * trials);
  for (int i = 0; i < n; ++i) {
    const double mid = (i + 0.5) * w;
    CHECK(std::abs(sum(i) / trials - mid) < 3.0 * sd);
  }
}

TEST_CASE("importance upsample concentrates where the coarse weights are") {
  Rng rng(777);
  Vec t_coarse(5);
  t_coarse << 0.0, 0.25, 0.5, 0.75, 1.0;
  Vec weights(4);
  weights << 0.0, 0.0, 1.0, 0.0;
  const Vec merged = importance_upsample(t_coarse, weights, 32, rng);
  REQUIRE(merged.size() == 5 + 32);

  // everything that is not one of the coarse depths must land in [0.5, 0.75]
  int fresh = 0;
  for (Eigen::Index i = 0; i < merged.size(); ++i) {
    bool is_coarse = false;
    for (Eigen::Index j = 0; j < t_coarse.size(); ++j)
      if (merged(i) == t_coarse(j)) is_coarse = true;
    if (is_coarse) continue;
    ++fresh;
    CHECK(merged(i) >= 0.5);
    CHECK(merged(i) <= 0.75);
  }
  CHECK(fresh == 32);
}

TEST_CASE("importance upsample with uniform weights is uniform") {
  Rng rng(424242);
  const int segments = 16;
  Vec t_coarse(segments + 1);
  for (int i = 0; i <= segments; ++i) t_coarse(i) = static_cast<double>(i) / segments;
  const Vec weights = Vec::Ones(segments);
  const int m = 10000;
  const Vec merged = importance_upsample(t_coarse, weights, m, rng);
  REQUIRE(merged.size() == segments + 1 + m);

  // histogram the fresh depths (coarse values appear exactly once each)
  std::vector<bool> coarse_seen(segments + 1, false);
  std::vector<double> observed(segments, 0.0);
  for (Eigen::Index i = 0; i < merged.size(); ++i) {
    bool matched = false;
    for (int j = 0; j <= segments; ++j) {
      if (!coarse_seen[j] && merged(i) == t_coarse(j)) {
        coarse_seen[j] = true;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    int bin = static_cast<int>(merged(i) * segments);
    if (bin >= segments) bin = segments - 1;
    observed[bin] += 1.0;
  }
  const std::vector<double> expected(segments, static_cast<double>(m) / segments);
  CHECK(chi_square_pvalue(observed, expected) > 0.01);
}

TEST_CASE("importance upsample output is sorted, bounded, and sized N+m") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(30));
    Vec t(n);
    t(0) = rng.uniform(0.0, 0.5);
    for (int i = 1; i < n; ++i) t(i) = t(i - 1) + rng.uniform(1e-4, 0.2);
    Vec w(n - 1);
    for (int i = 0; i + 1 < n; ++i)
      w(i) = trial % 5 == 0 ? 0.0 : rng.uniform(0.0, 2.0);  // sometimes all-zero
    const int m = 1 + static_cast<int>(rng.uniform_index(40));
    const Vec merged = importance_upsample(t, w, m, rng);
    REQUIRE(merged.size() == n + m);
    CHECK(merged(0) >= t(0));
    CHECK(merged(merged.size() - 1) <= t(n - 1));
    for (Eigen::Index i = 1; i < merged.size(); ++i) CHECK(merged(i) > merged(i - 1));
  }

  Vec t2(3);
  t2 << 0.0, 0.5, 1.0;
  Vec bad(3);
  bad << 1.0, 1.0, 1.0;
  CHECK_THROWS(importance_upsample(t2, bad, 4, rng));  // one weight per segment
  Vec neg(2);
  neg << 0.5, -0.1;
  CHECK_THROWS(importance_upsample(t2, neg, 4, rng));
}

TEST_CASE("importance upsample consumes the same rng draws in both branches") {
  Rng a(5150), b(5150);
  Vec t(4);
  t << 0.0, 0.3, 0.6, 1.0;
  Vec guided(3), zero(3);
  guided << 1.0, 2.0, 3.0;
  zero << 0.0, 0.0, 0.0;
  importance_upsample(t, guided, 17, a);
  importance_upsample(t, zero, 17, b);
  CHECK(a.uniform() == b.uniform());  // both consumed exactly 17 draws
}

TEST_CASE("sdf-to-opacity matches a straight-line sigmoid oracle") {
  // pinned examples
  CHECK(neus_alpha(0.3, 0.3, 30.0) == 0.0);    // no SDF change
  CHECK(neus_alpha(-0.1, 0.1, 10.0) == 0.0);   // exiting: clamped
  const double a = neus_alpha(0.2, 0.1, 10.0); // (sigma(2)-sigma(1))/sigma(2)
  CHECK(a == alpha_oracle(0.2, 0.1, 10.0));
  CHECK(std::abs(a - 0.1700) < 1e-4);

  // extreme magnitudes: saturated sigmoids and the denominator floor
  CHECK(neus_alpha(-3.0, -2.9, 300.0) == alpha_oracle(-3.0, -2.9, 300.0));
  CHECK(neus_alpha(-3.0, 3.0, 300.0) == 0.0);
  CHECK(neus_alpha(3.0, -3.0, 300.0) == alpha_oracle(3.0, -3.0, 300.0));
  CHECK(neus_alpha(3.0, -3.0, 300.0) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const double f_i = rng.uniform(-2.0, 2.0);
    const double f_next = rng.uniform(-2.0, 2.0);
    const double s = 0.1 * std::exp(rng.uniform() * std::log(3000.0));
    const double got = neus_alpha(f_i, f_next, s);
    CHECK(got == alpha_oracle(f_i, f_next, s));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("opacity graph matches the scalar kernel bitwise and respects ray boundaries") {
  Rng rng(31337);
  const int rays = 3, samples = 5;
  const Mat f = random_mat(rng, 1, rays * samples, -1.0, 1.0);
  const double s_val = 7.3;

  Tape tape;
  Tape::VarId fv = tape.input(f);
  Tape::VarId sv = tape.input(Mat::Constant(1, 1, s_val));
  Tape::VarId av = neus_alpha_graph(tape, fv, sv, samples);
  const Mat& alpha = tape.value(av);
  REQUIRE(alpha.cols() == rays * (samples - 1));
  for (int r = 0; r < rays; ++r)
    for (int j = 0; j + 1 < samples; ++j) {
      const double want = neus_alpha(f(0, r * samples + j), f(0, r * samples + j + 1), s_val);
      CHECK(alpha(0, r * (samples - 1) + j) == want);
    }

  CHECK_THROWS(neus_alpha_graph(tape, fv, sv, 4));  // 15 cols, not divisible
  Tape::VarId s_bad = tape.input(Mat::Constant(1, 1, -1.0));
  CHECK_THROWS(neus_alpha_graph(tape, fv, s_bad, samples));
}

TEST_CASE("compositing pinned examples") {
  const Vec3 black(0.0, 0.0, 0.0);

  // opaque first sample swallows everything behind it
  Mat a1(1, 2);
  a1 << 1.0, 0.7;
  Mat c1(3, 2);
  c1 << 0.2, 0.9, 0.4, 0.9, 0.6, 0.9;
  const CompositePlain r1 = composite_plain(a1, c1, 2, black);
  CHECK(r1.weights(0, 0) == 1.0);
  CHECK(r1.weights(0, 1) == 0.0);
  CHECK(r1.residual(0, 0) == 0.0);
  CHECK(r1.rgb(0, 0) == 0.2);
  CHECK(r1.rgb(1, 0) == 0.4);
  CHECK(r1.rgb(2, 0) == 0.6);

  // fully transparent ray shows the background
  Mat a2 = Mat::Zero(1, 3);
  Mat c2 = Mat::Constant(3, 3, 0.5);
  const Vec3 bg(0.1, 0.2, 0.3);
  const CompositePlain r2 = composite_plain(a2, c2, 3, bg);
  CHECK(r2.weights.maxCoeff() == 0.0);
  CHECK(r2.residual(0, 0) == 1.0);
  CHECK(r2.rgb(0, 0) == 0.1);
  CHECK(r2.rgb(1, 0) == 0.2);
  CHECK(r2.rgb(2, 0) == 0.3);

  // direct product arithmetic: w = [0.5, 0.5*0.5]
  Mat a3(1, 2);
  a3 << 0.5, 0.5;
  const CompositePlain r3 = composite_plain(a3, Mat::Ones(3, 2), 2, black);
  CHECK(r3.weights(0, 0) == 0.5);
  CHECK(r3.weights(0, 1) == 0.25);
  CHECK(r3.transmittance(0, 0) == 1.0);
  CHECK(r3.transmittance(0, 1) == 0.5);
  CHECK(r3.residual(0, 0) == 0.25);
}

TEST_CASE("compositing graph and scalar reference agree bitwise") {
  Rng rng(606);
  const int rays = 4, group = 6;
  const Mat alphas = random_mat(rng, 1, rays * group, 0.0, 1.0);
  const Mat colors = random_mat(rng, 3, rays * group);
  const Vec3 bg(0.2, 0.3, 0.4);

  Tape tape;
  Tape::VarId av = tape.input(alphas);
  Tape::VarId cv = tape.input(colors);
  const CompositeGraph g = composite_graph(tape, av, cv, group, bg);
  const CompositePlain p = composite_plain(alphas, colors, group, bg);

  CHECK(std::memcmp(tape.value(g.weights).data(), p.weights.data(),
                    sizeof(double) * rays * group) == 0);
  CHECK(std::memcmp(tape.value(g.residual).data(), p.residual.data(),
                    sizeof(double) * rays) == 0);
  CHECK(std::memcmp(tape.value(g.rgb).data(), p.rgb.data(),
                    sizeof(double) * 3 * rays) == 0);
}

TEST_CASE("per-ray weights are nonnegative and sum to at most one") {
  Rng rng(1234);
  const int rays = 500, group = 16;
  Mat alphas(1, rays * group);
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    const double pick = rng.uniform();
    if (pick < 0.15) alphas(0, i) = 0.0;
    else if (pick < 0.3) alphas(0, i) = 1.0;
    else if (pick < 0.45) alphas(0, i) = 0.9999999999999999;
    else alphas(0, i) = rng.uniform();
  }
  const CompositePlain out =
      composite_plain(alphas, Mat::Ones(3, rays * group), group, Vec3::Zero());
  for (int r = 0; r < rays; ++r) {
    double sum = 0.0;
    for (int j = 0; j < group; ++j) {
      const double w = out.weights(0, r * group + j);
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum <= 1.0);
    CHECK(out.residual(0, r) >= 0.0);
    CHECK(std::abs(sum + out.residual(0, r) - 1.0) < 1e-10);
  }
}

TEST_CASE("photometric loss pinned values and gradient") {
  Rng rng(8080);
  const Mat gt = random_mat(rng, 3, 7);
  CHECK(rgb_loss_plain(gt, gt) == 0.0);

  // constant offset of 0.1 on every channel: each ray contributes 3 * 0.01
  const Mat off = gt.array() + 0.1;
  CHECK(rgb_loss_plain(off, gt) == doctest::Approx(0.03).epsilon(1e-12));

  Tape tape;
  Tape::VarId pv = tape.input(off);
  CHECK(tape.value(rgb_loss_graph(tape, pv, gt))(0, 0) == rgb_loss_plain(off, gt));

  const Mat pred0 = random_mat(rng, 3, 5);
  const double worst = gradcheck(
      [&](Tape& t, const std::vector<Tape::VarId>& v) {
        return rgb_loss_graph(t, v[0], gt.leftCols(5));
      },
      {pred0});
  CHECK(worst < 1e-6);

  CHECK_THROWS(rgb_loss_plain(Mat(3, 0), Mat(3, 0)));
  CHECK_THROWS(rgb_loss_plain(Mat::Zero(3, 2), Mat::Zero(3, 3)));
}

TEST_CASE("psnr pinned values, mask semantics, and rejection") {
  Rng rng(515);
  const Mat gt = random_mat(rng, 3, 8);
  CHECK(std::isinf(psnr(gt, gt)));

  // MSE 0.01 -> 20 dB
  const Mat zeros = Mat::Zero(3, 10);
  const Mat tenth = Mat::Constant(3, 10, 0.1);
  CHECK(psnr(tenth, zeros) == doctest::Approx(20.0).epsilon(1e-12));

  // mask over the left half equals the cropped-half score
  const Mat pred = random_mat(rng, 3, 8);
  std::vector<std::uint8_t> mask(8, 0);
  for (int i = 0; i < 4; ++i) mask[i] = 1;
  CHECK(psnr(pred, gt, mask) == psnr(pred.leftCols(4), gt.leftCols(4)));

  CHECK_THROWS(psnr(pred, gt, std::vector<std::uint8_t>(8, 0)));  // empty mask
  CHECK_THROWS(psnr(pred, gt, std::vector<std::uint8_t>(3, 1)));  // size mismatch
  CHECK_THROWS(psnr(pred, gt.leftCols(4)));
}

TEST_CASE("center pixel looks along the optical axis") {
  const Camera cam =
      Camera::look_at(Vec3(0, 0, 2), Vec3::Zero(), Vec3(0, 1, 0), 64, 64, 46.0);
  CHECK((cam.optical_axis() - Vec3(0, 0, -1)).norm() < 1e-12);
  CHECK((cam.direction_through(cam.cx, cam.cy) - cam.optical_axis()).norm() < 1e-12);

  std::vector<std::pair<int, int>> pixels;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) pixels.emplace_back(x, y);
  const std::vector<Ray> rays = generate_rays(cam, pixels);
  REQUIRE(rays.size() == 64 * 64);
  for (const Ray& r : rays) CHECK(std::abs(r.dir.norm() - 1.0) < 1e-9);

  CHECK_THROWS(generate_rays(cam, {{64, 0}}));
  CHECK_THROWS(generate_rays(cam, {{0, -1}}));

  Camera bad = cam;
  bad.rotation *= 2.0;
  CHECK_THROWS(bad.validate());
  bad = cam;
  bad.fx = 0.0;
  CHECK_THROWS(bad.validate());
  CHECK_THROWS(Camera::look_at(Vec3(0, 0, 2), Vec3(0, 0, 0), Vec3(0, 0, 1), 8, 8, 46.0));
}

TEST_CASE("projection round-trips through ray directions") {
  const Camera cam =
      Camera::look_at(Vec3(0.3, -0.2, 1.9), Vec3(0.1, 0.0, 0.0), Vec3(0, 1, 0), 48, 36, 52.0);
  const double probes[][2] = {{3.7, 9.2}, {24.5, 18.25}, {0.5, 35.5}, {47.5, 0.5}};
  for (const auto& uv : probes) {
    const Vec3 p = cam.position + 1.7 * cam.direction_through(uv[0], uv[1]);
    double u = 0, v = 0;
    REQUIRE(cam.project(p, &u, &v));
    CHECK(std::abs(u - uv[0]) < 1e-9);
    CHECK(std::abs(v - uv[1]) < 1e-9);
  }
  // a point behind the camera does not project
  const Vec3 behind = cam.position - cam.optical_axis();
  CHECK_FALSE(cam.project(behind, nullptr, nullptr));
}

TEST_CASE("look-at camera center ray sphere-traces to the front of a sphere") {
  const Camera cam =
      Camera::look_at(Vec3(0, 0, 2), Vec3::Zero(), Vec3(0, 1, 0), 64, 64, 46.0);
  const Ray ray = ray_through(cam, cam.cx, cam.cy);
  REQUIRE(ray.hits_domain);
  CHECK(ray.t_near == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ray.t_far == doctest::Approx(3.0).epsilon(1e-12));

  const auto sphere = [](const Vec3& x) { return x.norm() - 0.5; };
  const double t_hit = sphere_trace(ray, sphere);
  CHECK(t_hit == doctest::Approx(1.5).epsilon(1e-9));
  const Vec3 hit = ray.origin + t_hit * ray.dir;
  CHECK((hit - Vec3(0, 0, 0.5)).norm() < 1e-8);
}

TEST_CASE("rays that miss the scene domain are flagged") {
  // facing away from the origin: the bounding sphere is entirely behind
  const Camera away =
      Camera::look_at(Vec3(0, 0, 2), Vec3(0, 0, 5), Vec3(0, 1, 0), 8, 8, 46.0);
  const Ray miss = ray_through(away, away.cx, away.cy);
  CHECK_FALSE(miss.hits_domain);

  // camera inside the domain: interval starts at the epsilon floor
  Camera inside =
      Camera::look_at(Vec3(0, 0, 0.2), Vec3(0, 0, 5), Vec3(0, 1, 0), 8, 8, 46.0);
  const Ray from_inside = ray_through(inside, inside.cx, inside.cy);
  REQUIRE(from_inside.hits_domain);
  CHECK(from_inside.t_near == 1e-4);
  CHECK(from_inside.t_far == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("single-crossing weight peak sits at the surface") {
  // linear SDF along the ray, zero at t* = 1.5, front-facing (decreasing)
  const int n = 128;
  const Vec t = stratified_samples(1.0, 3.0, n, false, nullptr);
  const double spacing = 2.0 / n;
  for (const double s : {10.0, 50.0, 200.0}) {
    Mat alphas(1, n - 1);
    for (int i = 0; i + 1 < n; ++i)
      alphas(0, i) = neus_alpha(0.7 * (1.5 - t(i)), 0.7 * (1.5 - t(i + 1)), s);
    const CompositePlain out =
        composite_plain(alphas, Mat::Ones(3, n - 1), n - 1, Vec3::Zero());
    int arg = 0;
    for (int i = 1; i + 1 < n; ++i)
      if (out.weights(0, i) > out.weights(0, arg)) arg = i;
    const double mid = 0.5 * (t(arg) + t(arg + 1));
    CHECK(std::abs(mid - 1.5) <= spacing + 1e-12);
  }
}

TEST_CASE("first of two crossings absorbs more weight") {
  // two slabs along the ray: occupied on (1.3, 1.5) and (2.1, 2.3)
  const auto f = [](double t) {
    return std::min(std::abs(t - 1.4), std::abs(t - 2.2)) - 0.1;
  };
  const int n = 256;
  const Vec t = stratified_samples(1.0, 3.0, n, false, nullptr);
  for (const double s : {10.0, 50.0}) {
    Mat alphas(1, n - 1);
    for (int i = 0; i + 1 < n; ++i) alphas(0, i) = neus_alpha(f(t(i)), f(t(i + 1)), s);
    const CompositePlain out =
        composite_plain(alphas, Mat::Ones(3, n - 1), n - 1, Vec3::Zero());
    double first = 0.0, second = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double mid = 0.5 * (t(i) + t(i + 1));
      if (std::abs(mid - 1.3) <= 0.1) first += out.weights(0, i);
      if (std::abs(mid - 2.1) <= 0.1) second += out.weights(0, i);
    }
    CHECK(first > second);
    CHECK(first > 0.0);
  }
}

TEST_CASE("compositing gradient matches finite differences") {
  Rng rng(9090);
  const int rays = 2, group = 4;
  // keep alphas away from 0/1 so no clamp kink sits under a probe
  const Mat alphas = random_mat(rng, 1, rays * group, 0.05, 0.7);
  const Mat colors = random_mat(rng, 3, rays * group);
  const Mat target = random_mat(rng, 3, rays);

  const double worst = gradcheck(
      [&](Tape& t, const std::vector<Tape::VarId>& v) {
        const CompositeGraph g = composite_graph(t, v[0], v[1], group, Vec3(0.6, 0.5, 0.4));
        return rgb_loss_graph(t, g.rgb, target);
      },
      {alphas, colors});
  CHECK(worst < 1e-6);
}

TEST_CASE("full rendering chain gradient matches finite differences") {
  Rng rng(7171);
  const int rays = 2, samples = 6;
  // strictly decreasing SDF per ray: every alpha strictly positive, so the
  // max(.,0) clamp is differentiable at the probe points
  Mat f(1, rays * samples);
  for (int r = 0; r < rays; ++r)
    for (int i = 0; i < samples; ++i)
      f(0, r * samples + i) = 0.5 - 0.18 * i + 0.01 * rng.uniform();
  const Mat s0 = Mat::Constant(1, 1, 10.0);
  const Mat colors = random_mat(rng, 3, rays * (samples - 1));
  const Mat target = random_mat(rng, 3, rays);

  const double worst = gradcheck(
      [&](Tape& t, const std::vector<Tape::VarId>& v) {
        Tape::VarId alphas = neus_alpha_graph(t, v[0], v[1], samples);
        const CompositeGraph g =
            composite_graph(t, alphas, t.input(colors), samples - 1, Vec3(0.9, 0.9, 0.9));
        return rgb_loss_graph(t, g.rgb, target);
      },
      {f, s0});
  CHECK(worst < 1e-5);
}

TEST_CASE("png round-trip quantizes to 8 bits") {
  TempDir dir("png");
  Image img(7, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x)
      img.set(x, y, Vec3(((x * 3 + y * 7 + 0) % 256) / 255.0,
                         ((x * 3 + y * 7 + 85) % 256) / 255.0,
                         ((x * 3 + y * 7 + 170) % 256) / 255.0));
  write_png(dir.str("exact.png"), img);
  const Image back = read_png(dir.str("exact.png"));
  REQUIRE(back.width == 7);
  REQUIRE(back.height == 5);
  CHECK((back.pixels - img.pixels).cwiseAbs().maxCoeff() == 0.0);

  // arbitrary values round to the nearest of 256 levels
  Rng rng(11);
  Image noise(9, 4);
  for (Eigen::Index i = 0; i < noise.pixels.size(); ++i)
    noise.pixels.data()[i] = rng.uniform();
  write_png(dir.str("noise.png"), noise);
  const Image nb = read_png(dir.str("noise.png"));
  CHECK((nb.pixels - noise.pixels).cwiseAbs().maxCoeff() <= 0.5 / 255.0 + 1e-12);

  // out-of-range values clamp
  Image hot(2, 1);
  hot.set(0, 0, Vec3(-0.5, 1.5, 0.25));
  hot.set(1, 0, Vec3(2.0, -2.0, 1.0));
  write_png(dir.str("hot.png"), hot);
  const Image hb = read_png(dir.str("hot.png"));
  CHECK(hb.at(0, 0)(0) == 0.0);
  CHECK(hb.at(0, 0)(1) == 1.0);
  CHECK(hb.at(1, 0)(0) == 1.0);
  CHECK(hb.at(1, 0)(1) == 0.0);

  CHECK_THROWS(read_png(dir.str("missing.png")));
}

TEST_CASE("pfm round-trip is lossless for float data") {
  TempDir dir("pfm");
  Rng rng(22);
  Image img(6, 3);
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i)
    img.pixels.data()[i] = static_cast<double>(static_cast<float>(rng.uniform(-2.0, 4.0)));
  write_pfm(dir.str("a.pfm"), img);
  const Image back = read_pfm(dir.str("a.pfm"));
  REQUIRE(back.width == 6);
  REQUIRE(back.height == 3);
  CHECK((back.pixels - img.pixels).cwiseAbs().maxCoeff() == 0.0);

  std::ofstream junk(dir.str("junk.pfm"), std::ios::binary);
  junk << "XY 1 1 -1.0\n";
  junk.close();
  CHECK_THROWS(read_pfm(dir.str("junk.pfm")));
  CHECK_THROWS(read_pfm(dir.str("absent.pfm")));
}

TEST_CASE("mask from image thresholds any channel") {
  Image img(3, 1);
  img.set(0, 0, Vec3(0.6, 0.0, 0.0));
  img.set(1, 0, Vec3(0.2, 0.3, 0.1));
  img.set(2, 0, Vec3(0.0, 0.0, 0.7));
  const auto mask = image_to_mask(img);
  REQUIRE(mask.size() == 3);
  CHECK(mask[0] == 1);
  CHECK(mask[1] == 0);
  CHECK(mask[2] == 1);
  const auto loose = image_to_mask(img, 0.05);
  CHECK(loose[0] == 1);
  CHECK(loose[1] == 1);
  CHECK(loose[2] == 1);
}
