#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "neusurf/autodiff/encoding.hpp"
#include "neusurf/autodiff/mlp.hpp"
#include "neusurf/autodiff/params.hpp"
#include "neusurf/autodiff/scalar_ops.hpp"
#include "neusurf/autodiff/tape.hpp"
#include "neusurf/core/tensor_file.hpp"
#include "support/test_utils.hpp"

using namespace neusurf;
using neusurf::testing::gradcheck;
using neusurf::testing::rel_err;
using neusurf::testing::TempDir;

namespace {

Mat random_mat(Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

}  // namespace

TEST_CASE("rng: deterministic, uniform bounds, normal moments") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());

  Rng r(7);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  CHECK(std::abs(sumsq / n - 1.0 / 3.0) < 0.005);

  double nsum = 0.0, nsumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = r.normal();
    nsum += x;
    nsumsq += x * x;
  }
  CHECK(std::abs(nsum / n) < 0.01);
  CHECK(std::abs(nsumsq / n - 1.0) < 0.02);
}

TEST_CASE("rng: state round-trip resumes the exact stream") {
  Rng a(123);
  for (int i = 0; i < 37; ++i) a.uniform();
  const std::string s = a.state();
  Rng b(0);
  b.set_state(s);
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());
}

TEST_CASE("tensor file: bit-exact matrix round-trip plus strings") {
  Rng rng(5);
  TempDir dir("tensorfile");
  TensorFile tf;
  Mat a = random_mat(rng, 7, 3, -100.0, 100.0);
  a(0, 0) = 0.1 + 0.2;  // not exactly representable; survives round-trip
  Mat b = random_mat(rng, 1, 1);
  tf.put("layer.w", a);
  tf.put("s", b);
  tf.put_string("rng.state", "123 456 789");
  tf.save(dir.str("x.bin"));

  TensorFile in = TensorFile::load(dir.str("x.bin"));
  REQUIRE(in.has("layer.w"));
  const Mat& a2 = in.get("layer.w");
  REQUIRE(a2.rows() == a.rows());
  REQUIRE(a2.cols() == a.cols());
  CHECK(std::memcmp(a.data(), a2.data(), sizeof(double) * a.size()) == 0);
  CHECK(in.get("s")(0, 0) == b(0, 0));
  CHECK(in.get_string("rng.state") == "123 456 789");
  CHECK_THROWS(in.get("missing"));
}

TEST_CASE("tensor file: corrupt magic rejected") {
  TempDir dir("tensorfile2");
  {
    std::ofstream os(dir.str("bad.bin"), std::ios::binary);
    os << "JUNKJUNKJUNKJUNK";
  }
  CHECK_THROWS(TensorFile::load(dir.str("bad.bin")));
}

// ---------------------------------------------------------------------------
// tape: forward values

TEST_CASE("tape: forward values of basic ops") {
  Tape t;
  Mat a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  Mat b(2, 2);
  b << 0.5, -1.0, 2.0, 0.25;
  auto va = t.input(a), vb = t.input(b);

  CHECK(t.value(t.add(va, vb))(1, 0) == 5.0);
  CHECK(t.value(t.sub(va, vb))(0, 1) == 3.0);
  CHECK(t.value(t.mul(va, vb))(1, 1) == 1.0);
  CHECK(t.value(t.matmul(va, vb))(0, 0) == doctest::Approx(4.5));
  CHECK(t.value(t.sum_all(va))(0, 0) == 10.0);
  CHECK(t.value(t.mean_all(va))(0, 0) == 2.5);
  CHECK(t.value(t.sigmoid(t.constant(Mat::Zero(1, 1))))(0, 0) == 0.5);
  CHECK(t.value(t.clamp_min(vb, 0.0)).minCoeff() == 0.0);
  CHECK(t.value(t.abs(vb))(0, 1) == 1.0);

  Mat big(1, 1);
  big << 3.0;
  // softplus(3) at beta=100 saturates to identity within double precision
  CHECK(t.value(t.softplus(t.constant(big), 100.0))(0, 0) == 3.0);
  // and at beta=1 equals log(1+e^3)
  CHECK(t.value(t.softplus(t.constant(big), 1.0))(0, 0) ==
        doctest::Approx(std::log1p(std::exp(3.0))).epsilon(1e-12));
}

TEST_CASE("tape: shape violations throw") {
  Tape t;
  auto a = t.input(Mat::Zero(2, 3));
  auto b = t.input(Mat::Zero(3, 2));
  CHECK_THROWS(t.add(a, b));
  CHECK_THROWS(t.mul(a, b));
  CHECK_THROWS(t.matmul(a, a));
  CHECK_THROWS(t.slice_rows(a, 1, 5));
  CHECK_THROWS(t.gather_cols(a, {0, 3}));
  CHECK_THROWS(t.group_sum_cols(a, 2));
  CHECK_THROWS(t.backward(a));  // non-scalar root
}

// ---------------------------------------------------------------------------
// tape: gradients vs central differences

TEST_CASE("tape: gradcheck of elementwise and broadcast ops") {
  Rng rng(11);
  // Chained composite touching most elementwise ops; inputs kept in ranges
  // where log/sqrt are smooth.
  auto build = [](Tape& t, const std::vector<Tape::VarId>& v) {
    auto x = v[0], y = v[1];
    auto e1 = t.mul(t.sin(x), t.cos(y));
    auto e2 = t.exp(t.scale(x, 0.3));
    auto e3 = t.log(t.add_const(t.square(y), 1.5));
    auto e4 = t.sqrt(t.add_const(t.abs(x), 1.0));
    auto e5 = t.sigmoid(t.sub(x, y));
    auto e6 = t.softplus(t.neg(x), 10.0);
    auto s = t.add(t.add(e1, e2), t.add(e3, t.add(e4, t.add(e5, e6))));
    return t.mean_all(t.div(s, t.add_const(t.square(y), 2.0)));
  };
  double err = gradcheck(build, {random_mat(rng, 4, 5), random_mat(rng, 4, 5)});
  CHECK(err < 1e-7);
}

TEST_CASE("tape: gradcheck of matmul / transpose / matmul_tn") {
  Rng rng(12);
  auto build = [](Tape& t, const std::vector<Tape::VarId>& v) {
    auto p = t.matmul(v[0], v[1]);          // (3x4)(4x2) -> 3x2
    auto q = t.matmul_tn(v[0], p);          // (3x4)^T (3x2) -> 4x2
    auto r = t.matmul(t.transpose(q), v[1]);  // (2x4)(4x2) -> 2x2
    return t.sum_all(t.square(r));
  };
  double err = gradcheck(build, {random_mat(rng, 3, 4), random_mat(rng, 4, 2)});
  CHECK(err < 1e-7);
}

TEST_CASE("tape: gradcheck of reductions, slicing, gathering, grouping") {
  Rng rng(13);
  auto build = [](Tape& t, const std::vector<Tape::VarId>& v) {
    auto x = v[0];  // 5 x 6
    auto sl = t.slice_rows(x, 1, 3);
    auto ga = t.gather_cols(sl, {0, 0, 2, 5, 3, 1});  // repeated index on purpose
    auto gs = t.group_sum_cols(ga, 3);
    auto cn = t.colwise_norm(t.add_const(gs, 0.3));
    auto cc = t.concat_rows({cn, t.square(cn)});
    return t.mean_all(cc);
  };
  double err = gradcheck(build, {random_mat(rng, 5, 6)});
  CHECK(err < 1e-7);
}

TEST_CASE("tape: gradcheck of colvec/rowvec broadcasts and scalar_mul") {
  Rng rng(14);
  auto build = [](Tape& t, const std::vector<Tape::VarId>& v) {
    auto x = v[0];                       // 3 x 4
    auto c = v[1];                       // 3 x 1
    auto r = v[2];                       // 1 x 4
    auto s = v[3];                       // 1 x 1
    auto a = t.add_colvec(x, c);
    auto b = t.mul_colvec(a, c);
    auto d = t.mul_rowvec(b, r);
    auto e = t.div_rowvec(d, t.add_const(t.square(r), 0.7));
    return t.sum_all(t.scalar_mul(s, e));
  };
  double err = gradcheck(build, {random_mat(rng, 3, 4), random_mat(rng, 3, 1),
                                 random_mat(rng, 1, 4), random_mat(rng, 1, 1)});
  CHECK(err < 1e-7);
}

TEST_CASE("tape: clamp gradient is zero in the clamped region") {
  Mat x(1, 4);
  x << -2.0, -0.5, 0.5, 2.0;
  Tape t;
  auto v = t.input(x);
  auto y = t.sum_all(t.clamp_min(v, 0.0));
  t.backward(y);
  const Mat& g = t.grad(v);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(0, 1) == 0.0);
  CHECK(g(0, 2) == 1.0);
  CHECK(g(0, 3) == 1.0);
}

TEST_CASE("tape: composite weights forward matches straight-line recompute") {
  Rng rng(15);
  const int group = 7, rays = 5;
  Mat alpha = random_mat(rng, 1, group * rays, 0.0, 1.0);
  Tape t;
  auto va = t.input(alpha);
  auto w = t.composite_weights(va, group);
  auto res = t.residual_transmittance(va, group);

  for (int r = 0; r < rays; ++r) {
    double trans = 1.0;
    double used = 0.0;
    for (int i = 0; i < group; ++i) {
      const double a = alpha(0, r * group + i);
      double wi = trans * a;
      if (used + wi > 1.0)
        wi = 1.0 - used;
      used += wi;
      CHECK(t.value(w)(0, r * group + i) == wi);  // bitwise
      trans = trans * (1.0 - a);
    }
    CHECK(t.value(res)(0, r) == trans);
  }
}

TEST_CASE("tape: composite weights invariants hold for random opacities") {
  // For any alpha in [0,1]: w_i >= 0 and sum_i w_i <= 1 per ray.
  Rng rng(16);
  const int group = 24;
  for (int trial = 0; trial < 2000; ++trial) {
    Mat alpha(1, group);
    for (int i = 0; i < group; ++i) {
      double u = rng.uniform();
      // mix of tame and extreme opacities, including exact 0 and 1
      if (u < 0.1)
        alpha(0, i) = 0.0;
      else if (u < 0.2)
        alpha(0, i) = 1.0;
      else
        alpha(0, i) = rng.uniform();
    }
    Tape t;
    auto w = t.composite_weights(t.constant(alpha), group);
    double sum = 0.0;
    for (int i = 0; i < group; ++i) {
      CHECK(t.value(w)(0, i) >= 0.0);
      sum += t.value(w)(0, i);
    }
    CHECK(sum <= 1.0);
  }
}

TEST_CASE("tape: composite adjoint matches finite differences away from the clamp") {
  Rng rng(17);
  const int group = 6;
  Mat alpha = random_mat(rng, 1, group * 3, 0.05, 0.95);
  auto build = [group](Tape& t, const std::vector<Tape::VarId>& v) {
    auto w = t.composite_weights(v[0], group);
    auto res = t.residual_transmittance(v[0], group);
    // arbitrary smooth functional of weights and residual
    return t.add(t.mean_all(t.square(w)), t.scale(t.mean_all(res), 0.25));
  };
  double err = gradcheck(build, {alpha});
  CHECK(err < 1e-7);
}

TEST_CASE("tape: composite adjoint is finite at alpha exactly 1") {
  // An opacity of exactly 1 kills transmittance behind it; the adjoint must
  // stay finite (division-free recurrence) and zero out fully occluded
  // samples.
  Mat alpha(1, 4);
  alpha << 0.3, 1.0, 0.4, 0.2;
  Mat coeff(1, 4);
  coeff << 0.9, -0.3, 0.7, 1.3;
  Tape t;
  auto va = t.input(alpha);
  auto w = t.composite_weights(va, 4);
  t.backward(t.sum_all(t.mul(w, t.constant(coeff))));
  const Mat& g = t.grad(va);
  for (int i = 0; i < 4; ++i) CHECK(std::isfinite(g(0, i)));
  // samples behind the opaque one contribute nothing
  CHECK(g(0, 2) == 0.0);
  CHECK(g(0, 3) == 0.0);
}

// ---------------------------------------------------------------------------
// encoding + MLP

TEST_CASE("encoding: layout, values, and graph/plain agreement") {
  EncodingConfig cfg;
  cfg.input_dim = 3;
  cfg.levels = 4;
  REQUIRE(cfg.output_dim() == 3 * (1 + 8));

  Rng rng(21);
  Mat x = random_mat(rng, 3, 5);
  Mat e = encode_plain(x, cfg);
  // identity rows
  CHECK(e.topRows(3) == x);
  // sin/cos rows at level k use frequency 2^k pi
  for (int k = 0; k < cfg.levels; ++k)
    for (int a = 0; a < 3; ++a)
      for (int j = 0; j < 5; ++j) {
        const double arg = std::ldexp(M_PI, k) * x(a, j);
        CHECK(e(3 + 6 * k + a, j) == doctest::Approx(std::sin(arg)).epsilon(1e-15));
        CHECK(e(3 + 6 * k + 3 + a, j) == doctest::Approx(std::cos(arg)).epsilon(1e-15));
      }

  Tape t;
  auto vx = t.input(x);
  auto trace = encode_graph(t, vx, cfg);
  CHECK(t.value(trace.encoded) == e);  // same scalar ops -> bitwise equal
}

TEST_CASE("encoding: gradcheck through the graph version") {
  EncodingConfig cfg;
  cfg.levels = 3;
  Rng rng(22);
  auto build = [&cfg](Tape& t, const std::vector<Tape::VarId>& v) {
    auto tr = encode_graph(t, v[0], cfg);
    return t.mean_all(t.square(tr.encoded));
  };
  CHECK(gradcheck(build, {random_mat(rng, 3, 4)}) < 1e-6);
}

TEST_CASE("mlp: plain and graph forward agree; gradcheck wrt params and input") {
  Rng rng(23);
  ParamStore store;
  MlpConfig cfg;
  cfg.input_dim = 5;
  cfg.output_dim = 2;
  cfg.hidden_width = 8;
  cfg.n_hidden = 2;
  cfg.softplus_beta = 3.0;
  Mlp mlp = Mlp::create(store, "net", cfg, rng);

  Mat x = random_mat(rng, 5, 7);
  Mat plain = mlp.forward_plain(x);

  Tape t;
  store.bind(t);
  auto out = mlp.forward_graph(t, t.constant(x));
  CHECK((t.value(out.out) - plain).cwiseAbs().maxCoeff() < 1e-13);

  // gradcheck w.r.t. every parameter: rebuild tape per probe
  auto build = [&](Tape& tp, const std::vector<Tape::VarId>& v) {
    // v holds parameter values in store order; overwrite and bind manually
    std::size_t i = 0;
    for (auto& p : store.items()) p->var = v[i++];
    auto tr = mlp.forward_graph(tp, tp.constant(x));
    return tp.mean_all(tp.square(tr.out));
  };
  std::vector<Mat> vals;
  for (auto& p : store.items()) vals.push_back(p->value);
  CHECK(gradcheck(build, vals, 1e-5, 40) < 1e-6);
}

TEST_CASE("mlp: analytic input gradient equals FD and plain chain equals graph chain") {
  Rng rng(24);
  ParamStore store;
  MlpConfig cfg;
  cfg.input_dim = 3;
  cfg.output_dim = 4;
  cfg.hidden_width = 16;
  cfg.n_hidden = 3;
  cfg.softplus_beta = 30.0;
  Mlp mlp = Mlp::create(store, "net", cfg, rng);

  Mat x = random_mat(rng, 3, 6);

  // graph chain
  Tape t;
  store.bind(t);
  auto trace = mlp.forward_graph(t, t.input(x));
  auto g = mlp.input_gradient_graph(t, trace, 0);
  const Mat gg = t.value(g);

  // plain chain
  std::vector<Mat> zc;
  (void)mlp.forward_plain(x, &zc);
  Mat gp = mlp.input_gradient_plain(zc, 0);
  CHECK((gg - gp).cwiseAbs().maxCoeff() < 1e-12);

  // FD on row 0 of the output
  for (int j = 0; j < x.cols(); ++j)
    for (int a = 0; a < 3; ++a) {
      const double h = 1e-6;
      Mat xp = x, xm = x;
      xp(a, j) += h;
      xm(a, j) -= h;
      const double fp = mlp.forward_plain(xp)(0, j);
      const double fm = mlp.forward_plain(xm)(0, j);
      CHECK(rel_err(gg(a, j), (fp - fm) / (2.0 * h)) < 1e-5);
    }
}

TEST_CASE("mlp: second derivatives through the gradient chain match FD of the chain") {
  // The input-gradient chain is itself a graph, so backward() through a
  // functional of it produces parameter gradients of a second-order quantity.
  Rng rng(25);
  ParamStore store;
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.output_dim = 1;
  cfg.hidden_width = 6;
  cfg.n_hidden = 2;
  cfg.softplus_beta = 2.0;
  Mlp mlp = Mlp::create(store, "net", cfg, rng);
  Mat x = random_mat(rng, 2, 3);

  auto build = [&](Tape& tp, const std::vector<Tape::VarId>& v) {
    std::size_t i = 0;
    for (auto& p : store.items()) p->var = v[i++];
    auto tr = mlp.forward_graph(tp, tp.constant(x));
    auto g = mlp.input_gradient_graph(tp, tr, 0);
    // "eikonal-like" functional of the spatial gradient
    return tp.mean_all(tp.square(tp.add_const(tp.colwise_norm(g), -1.0)));
  };
  std::vector<Mat> vals;
  for (auto& p : store.items()) vals.push_back(p->value);
  CHECK(gradcheck(build, vals, 1e-5, 30) < 1e-5);
}

TEST_CASE("mlp: identical seeds give bit-identical forward and backward") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    ParamStore store;
    MlpConfig cfg;
    cfg.input_dim = 3;
    cfg.output_dim = 2;
    cfg.hidden_width = 12;
    cfg.n_hidden = 2;
    Mlp mlp = Mlp::create(store, "net", cfg, rng);
    Mat x = Mat::Zero(3, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 0.01 * double(i) - 0.4;
    Tape t;
    store.bind(t);
    auto tr = mlp.forward_graph(t, t.constant(x));
    t.backward(t.mean_all(t.square(tr.out)));
    std::vector<Mat> out;
    out.push_back(t.value(tr.out));
    for (auto& p : store.items()) out.push_back(t.grad(p->var));
    return out;
  };
  auto a = run(99), b = run(99), c = run(100);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::memcmp(a[i].data(), b[i].data(), sizeof(double) * a[i].size()) == 0);
  CHECK(std::memcmp(a[0].data(), c[0].data(), sizeof(double) * a[0].size()) != 0);
}

TEST_CASE("params: save/load round-trips values and moments bit-exactly") {
  Rng rng(26);
  TempDir dir("params");
  ParamStore store;
  store.add("a", random_mat(rng, 3, 3));
  store.add("b", random_mat(rng, 2, 1));
  store.find("a")->m = random_mat(rng, 3, 3);
  store.find("a")->v = random_mat(rng, 3, 3, 0.0, 1.0);

  TensorFile tf;
  store.save(tf);
  tf.save(dir.str("p.bin"));

  ParamStore other;
  other.add("a", Mat::Zero(3, 3));
  other.add("b", Mat::Zero(2, 1));
  other.load(TensorFile::load(dir.str("p.bin")));
  CHECK(other.find("a")->value == store.find("a")->value);
  CHECK(other.find("a")->m == store.find("a")->m);
  CHECK(other.find("a")->v == store.find("a")->v);
  CHECK(other.find("b")->value == store.find("b")->value);

  ParamStore wrong;
  wrong.add("a", Mat::Zero(4, 3));  // shape mismatch must throw
  CHECK_THROWS(wrong.load(TensorFile::load(dir.str("p.bin"))));
}
