#include "neusurf/scene/scene_text.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace neusurf {

namespace {

[[noreturn]] void fail(int line_no, const std::string& why) {
  throw std::invalid_argument("scene text, line " + std::to_string(line_no) +
                              ": " + why);
}

std::vector<Real> parse_numbers(std::istringstream& in) {
  std::vector<Real> out;
  Real v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) return {};  // trailing junk: signal malformed via empty
  return out;
}

Mat3 rotation_from_tail(const std::vector<Real>& n, std::size_t at, int line_no) {
  const std::size_t extra = n.size() - at;
  if (extra == 0) return Mat3::Identity();
  if (extra == 4) {
    const Vec3 axis(n[at], n[at + 1], n[at + 2]);
    if (axis.norm() <= 0.0) fail(line_no, "rotation axis must be nonzero");
    return Eigen::AngleAxisd(n[at + 3], axis.normalized()).toRotationMatrix();
  }
  if (extra == 9) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = n[at + static_cast<std::size_t>(i) * 3 + j];
    if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
        r.determinant() < 0.0)
      fail(line_no, "rotation matrix is not a proper rotation");
    return r;
  }
  fail(line_no, "rotation tail must be 4 numbers (axis, angle) or 9 (matrix)");
}

void write_number(std::ostream& os, Real v) {
  os << ' ' << std::setprecision(17) << v;
}

void write_rotation_tail(std::ostream& os, const Mat3& r) {
  if ((r - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0) return;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) write_number(os, r(i, j));
}

}  // namespace

Scene parse_scene(const std::string& text) {
  std::istringstream in(text);
  Scene scene;
  scene.primitives.clear();
  std::string line;
  int line_no = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;  // blank

    if (!saw_header) {
      int version = 0;
      if (word != "scene" || !(ls >> version) || version != 1)
        fail(line_no, "expected header 'scene 1'");
      saw_header = true;
      continue;
    }

    const std::vector<Real> n = parse_numbers(ls);
    if (word == "background") {
      if (n.size() != 3) fail(line_no, "background needs 3 numbers");
      scene.background = Vec3(n[0], n[1], n[2]);
    } else if (word == "ambient") {
      if (n.size() != 1) fail(line_no, "ambient needs 1 number");
      scene.ambient = n[0];
    } else if (word == "light") {
      if (n.size() != 3) fail(line_no, "light needs 3 numbers");
      const Vec3 l(n[0], n[1], n[2]);
      if (l.norm() <= 0.0) fail(line_no, "light direction must be nonzero");
      scene.light_dir = l.normalized();
    } else if (word == "foreground") {
      if (n.size() != 1 || n[0] != std::floor(n[0]))
        fail(line_no, "foreground needs 1 integer");
      scene.n_foreground = static_cast<int>(n[0]);
    } else if (word == "sphere") {
      if (n.size() != 7) fail(line_no, "sphere needs 7 numbers");
      scene.primitives.push_back(
          make_sphere(Vec3(n[0], n[1], n[2]), n[3], Vec3(n[4], n[5], n[6])));
    } else if (word == "box") {
      if (n.size() != 9 && n.size() != 13 && n.size() != 18)
        fail(line_no, "box needs 9 numbers plus an optional rotation tail");
      scene.primitives.push_back(make_box(Vec3(n[0], n[1], n[2]),
                                          Vec3(n[3], n[4], n[5]),
                                          Vec3(n[6], n[7], n[8]),
                                          rotation_from_tail(n, 9, line_no)));
    } else if (word == "torus") {
      if (n.size() != 8 && n.size() != 12 && n.size() != 17)
        fail(line_no, "torus needs 8 numbers plus an optional rotation tail");
      scene.primitives.push_back(make_torus(Vec3(n[0], n[1], n[2]), n[3], n[4],
                                            Vec3(n[5], n[6], n[7]),
                                            rotation_from_tail(n, 8, line_no)));
    } else {
      fail(line_no, "unknown directive '" + word + "'");
    }
  }

  if (!saw_header) throw std::invalid_argument("scene text: missing 'scene 1' header");
  if (scene.primitives.empty())
    throw std::invalid_argument("scene text: no primitives");
  if (scene.n_foreground < -1 || scene.n_foreground == 0 ||
      scene.n_foreground > static_cast<int>(scene.primitives.size()))
    throw std::invalid_argument("scene text: foreground count out of range");
  return scene;
}

std::string format_scene(const Scene& scene) {
  std::ostringstream os;
  os << "scene 1\n";
  os << "background";
  for (int i = 0; i < 3; ++i) write_number(os, scene.background(i));
  os << "\nambient";
  write_number(os, scene.ambient);
  os << "\nlight";
  for (int i = 0; i < 3; ++i) write_number(os, scene.light_dir(i));
  os << '\n';
  if (scene.n_foreground >= 0) os << "foreground " << scene.n_foreground << '\n';

  for (const ScenePrimitive& p : scene.primitives) {
    switch (p.kind) {
      case PrimitiveKind::kSphere: {
        os << "sphere";
        for (int i = 0; i < 3; ++i) write_number(os, p.center(i));
        write_number(os, p.size(0));
        for (int i = 0; i < 3; ++i) write_number(os, p.albedo(i));
        break;
      }
      case PrimitiveKind::kBox: {
        os << "box";
        for (int i = 0; i < 3; ++i) write_number(os, p.center(i));
        for (int i = 0; i < 3; ++i) write_number(os, p.size(i));
        for (int i = 0; i < 3; ++i) write_number(os, p.albedo(i));
        write_rotation_tail(os, p.rotation);
        break;
      }
      case PrimitiveKind::kTorus: {
        os << "torus";
        for (int i = 0; i < 3; ++i) write_number(os, p.center(i));
        write_number(os, p.size(0));
        write_number(os, p.size(1));
        for (int i = 0; i < 3; ++i) write_number(os, p.albedo(i));
        write_rotation_tail(os, p.rotation);
        break;
      }
    }
    os << '\n';
  }
  return os.str();
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scene: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scene: cannot open " + path);
  out << format_scene(scene);
  if (!out) throw std::runtime_error("save_scene: write failed for " + path);
}

Scene make_fixture(const std::string& name) {
  Scene scene;
  scene.primitives.clear();
  const Vec3 warm(0.75, 0.60, 0.45);

  if (name == "sphere") {
    scene.primitives.push_back(make_sphere(Vec3::Zero(), 0.5, warm));
    return scene;
  }

  if (name == "composite") {
    scene.primitives.push_back(make_torus(
        Vec3(0.0, -0.05, 0.0), 0.42, 0.14, Vec3(0.30, 0.50, 0.80),
        Eigen::AngleAxisd(1.1, Vec3(1.0, 0.2, 0.0).normalized()).toRotationMatrix()));
    scene.primitives.push_back(make_box(
        Vec3(0.0, 0.22, 0.0), Vec3(0.18, 0.12, 0.18), Vec3(0.80, 0.45, 0.30),
        Eigen::AngleAxisd(0.6, Vec3(0.0, 1.0, 0.0)).toRotationMatrix()));
    return scene;
  }

  if (name == "cluttered") {
    scene.primitives.push_back(make_sphere(Vec3::Zero(), 0.45, warm));
    scene.n_foreground = 1;
    const Vec3 dim(0.16, 0.16, 0.16);
    struct Shard {
      Vec3 center, half, axis;
      Real angle;
    };
    const Shard shards[] = {
        {{0.72, -0.05, 0.18}, {0.100, 0.012, 0.085}, {0.2, 1.0, 0.1}, 0.50},
        {{-0.62, 0.10, 0.42}, {0.090, 0.012, 0.105}, {1.0, 0.2, 0.3}, -0.60},
        {{0.15, -0.12, -0.73}, {0.110, 0.012, 0.080}, {0.1, 1.0, 0.6}, 1.10},
        {{-0.35, -0.52, -0.48}, {0.100, 0.012, 0.090}, {1.0, 0.5, 0.2}, 0.90},
        {{0.40, -0.52, 0.42}, {0.085, 0.012, 0.100}, {0.3, 1.0, 0.8}, -1.20},
        {{-0.18, 0.62, -0.40}, {0.100, 0.012, 0.095}, {0.6, 0.2, 1.0}, 0.35},
    };
    for (const Shard& s : shards)
      scene.primitives.push_back(make_box(
          s.center, s.half, dim,
          Eigen::AngleAxisd(s.angle, s.axis.normalized()).toRotationMatrix()));
    return scene;
  }

  throw std::invalid_argument("make_fixture: unknown fixture '" + name + "'");
}

}  // namespace neusurf
