#include "neusurf/scene/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "neusurf/scene/render_scene.hpp"

namespace neusurf {

namespace {

constexpr Real kPi = 3.141592653589793238462643383279502884;

std::string view_name(const char* stem, int i, const char* ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(3) << std::setfill('0') << i << ext;
  return os.str();
}

[[noreturn]] void fail_parse(const std::string& path, int line_no,
                             const std::string& why) {
  throw std::runtime_error(path + ", line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

std::vector<Camera> ring_cameras(const DatasetConfig& config) {
  if (config.n_views < 3)
    throw std::invalid_argument("ring_cameras: need at least 3 views");
  if (config.radius <= 0.0)
    throw std::invalid_argument("ring_cameras: radius must be positive");

  Rng rng(config.seed);
  std::vector<Camera> cameras;
  cameras.reserve(static_cast<std::size_t>(config.n_views));
  for (int k = 0; k < config.n_views; ++k) {
    const Real azimuth = 2.0 * kPi * static_cast<Real>(k) / config.n_views;
    Real elevation = config.elevation;
    if (config.elevation_jitter > 0.0)
      elevation += rng.uniform(-config.elevation_jitter, config.elevation_jitter);
    const Vec3 offset(config.radius * std::cos(elevation) * std::cos(azimuth),
                      config.radius * std::sin(elevation),
                      config.radius * std::cos(elevation) * std::sin(azimuth));
    cameras.push_back(Camera::look_at(config.target + offset, config.target,
                                      config.up, config.width, config.height,
                                      config.fov_x_deg));
  }
  return cameras;
}

Dataset generate_dataset(const Scene& scene, const DatasetConfig& config) {
  Dataset data;
  data.cameras = ring_cameras(config);
  const Scene fg = scene.foreground();
  const bool separate_mask = scene.n_foreground >= 0 &&
                             fg.primitives.size() != scene.primitives.size();

  for (const Camera& camera : data.cameras) {
    ViewRender full = render_view(scene, camera);
    data.images.push_back(std::move(full.color));
    data.depths.push_back(std::move(full.depth));
    if (separate_mask) {
      ViewRender object = render_view(fg, camera);
      data.masks.push_back(std::move(object.mask));
    } else {
      data.masks.push_back(std::move(full.mask));
    }
  }
  return data;
}

void save_cameras(const std::vector<Camera>& cameras, const std::string& path) {
  if (cameras.empty())
    throw std::invalid_argument("save_cameras: no cameras");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_cameras: cannot open " + path);
  out << std::setprecision(17);
  out << "cameras 1\n";
  out << "count " << cameras.size() << "\n";
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    const Camera& c = cameras[i];
    c.validate();
    out << "view " << i << "\n";
    out << "size " << c.width << ' ' << c.height << "\n";
    out << "intrinsics " << c.fx << ' ' << c.fy << ' ' << c.cx << ' ' << c.cy
        << "\n";
    out << "pose";
    // row-major 4x4 world-from-camera
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) out << ' ' << c.rotation(r, col);
      out << ' ' << c.position(r);
    }
    out << " 0 0 0 1\n";
  }
  if (!out) throw std::runtime_error("save_cameras: write failed for " + path);
}

std::vector<Camera> load_cameras(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_cameras: cannot open " + path);

  std::string line, word;
  int line_no = 0;
  auto next_line = [&](const char* expect) -> std::istringstream {
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ls(line);
      if (!(ls >> word)) continue;  // blank
      if (word != expect)
        fail_parse(path, line_no, "expected '" + std::string(expect) +
                                      "', got '" + word + "'");
      return ls;
    }
    fail_parse(path, line_no, "unexpected end of file, wanted '" +
                                  std::string(expect) + "'");
  };

  {
    std::istringstream ls = next_line("cameras");
    int version = 0;
    if (!(ls >> version) || version != 1)
      fail_parse(path, line_no, "unsupported camera file version");
  }
  std::size_t count = 0;
  {
    std::istringstream ls = next_line("count");
    if (!(ls >> count) || count == 0)
      fail_parse(path, line_no, "bad camera count");
  }

  std::vector<Camera> cameras(count);
  for (std::size_t i = 0; i < count; ++i) {
    {
      std::istringstream ls = next_line("view");
      std::size_t id = 0;
      if (!(ls >> id) || id != i)
        fail_parse(path, line_no, "views must appear in order");
    }
    Camera& c = cameras[i];
    {
      std::istringstream ls = next_line("size");
      if (!(ls >> c.width >> c.height))
        fail_parse(path, line_no, "bad size line");
    }
    {
      std::istringstream ls = next_line("intrinsics");
      if (!(ls >> c.fx >> c.fy >> c.cx >> c.cy))
        fail_parse(path, line_no, "bad intrinsics line");
    }
    {
      std::istringstream ls = next_line("pose");
      Real m[16];
      for (Real& v : m)
        if (!(ls >> v)) fail_parse(path, line_no, "pose needs 16 numbers");
      if (m[12] != 0.0 || m[13] != 0.0 || m[14] != 0.0 || m[15] != 1.0)
        fail_parse(path, line_no, "pose bottom row must be 0 0 0 1");
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) c.rotation(r, col) = m[r * 4 + col];
        c.position(r) = m[r * 4 + 3];
      }
    }
    c.validate();
  }
  return cameras;
}

DatasetManifest save_dataset(const Dataset& dataset, const std::string& dir,
                             bool with_depth) {
  const std::size_t n = dataset.cameras.size();
  if (n == 0) throw std::invalid_argument("save_dataset: empty dataset");
  if (dataset.images.size() != n || dataset.masks.size() != n)
    throw std::invalid_argument("save_dataset: image/mask/camera counts differ");
  if (with_depth && dataset.depths.size() != n)
    throw std::invalid_argument("save_dataset: depth maps missing");

  namespace fs = std::filesystem;
  fs::create_directories(dir);

  DatasetManifest manifest;
  manifest.n_views = static_cast<int>(n);
  manifest.width = dataset.images[0].width;
  manifest.height = dataset.images[0].height;
  manifest.camera_file = "cameras.txt";
  manifest.scale_note = "world units; scene inside the unit sphere";
  manifest.split_note = "train all";

  save_cameras(dataset.cameras, (fs::path(dir) / manifest.camera_file).string());
  for (std::size_t i = 0; i < n; ++i) {
    const int id = static_cast<int>(i);
    manifest.image_files.push_back(view_name("view", id, ".png"));
    manifest.mask_files.push_back(view_name("mask", id, ".png"));
    write_png((fs::path(dir) / manifest.image_files.back()).string(),
              dataset.images[i]);
    write_png((fs::path(dir) / manifest.mask_files.back()).string(),
              dataset.masks[i]);
    if (with_depth) {
      const Image& img = dataset.images[i];
      Image depth_img(img.width, img.height);
      for (Eigen::Index p = 0; p < depth_img.pixels.cols(); ++p)
        depth_img.pixels.col(p).setConstant(dataset.depths[i](p));
      manifest.depth_files.push_back(view_name("depth", id, ".pfm"));
      write_pfm((fs::path(dir) / manifest.depth_files.back()).string(), depth_img);
    }
  }

  std::ofstream out((fs::path(dir) / "manifest.txt").string());
  if (!out) throw std::runtime_error("save_dataset: cannot write manifest");
  out << "dataset 1\n";
  out << "views " << manifest.n_views << "\n";
  out << "size " << manifest.width << ' ' << manifest.height << "\n";
  out << "cameras " << manifest.camera_file << "\n";
  out << "scale " << manifest.scale_note << "\n";
  out << "split " << manifest.split_note << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "view " << i << ' ' << manifest.image_files[i] << ' '
        << manifest.mask_files[i];
    if (with_depth) out << ' ' << manifest.depth_files[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_dataset: manifest write failed");
  return manifest;
}

DatasetManifest load_manifest(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string path = (fs::path(dir) / "manifest.txt").string();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_manifest: cannot open " + path);

  DatasetManifest manifest;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (!saw_header) {
      int version = 0;
      if (word != "dataset" || !(ls >> version) || version != 1)
        fail_parse(path, line_no, "expected header 'dataset 1'");
      saw_header = true;
    } else if (word == "views") {
      if (!(ls >> manifest.n_views)) fail_parse(path, line_no, "bad views line");
    } else if (word == "size") {
      if (!(ls >> manifest.width >> manifest.height))
        fail_parse(path, line_no, "bad size line");
    } else if (word == "cameras") {
      if (!(ls >> manifest.camera_file))
        fail_parse(path, line_no, "bad cameras line");
    } else if (word == "scale") {
      std::getline(ls, manifest.scale_note);
      if (!manifest.scale_note.empty() && manifest.scale_note.front() == ' ')
        manifest.scale_note.erase(0, 1);
    } else if (word == "split") {
      std::getline(ls, manifest.split_note);
      if (!manifest.split_note.empty() && manifest.split_note.front() == ' ')
        manifest.split_note.erase(0, 1);
    } else if (word == "view") {
      std::size_t id = 0;
      std::string image, mask, depth;
      if (!(ls >> id >> image >> mask))
        fail_parse(path, line_no, "bad view line");
      if (id != manifest.image_files.size())
        fail_parse(path, line_no, "views must appear in order");
      manifest.image_files.push_back(image);
      manifest.mask_files.push_back(mask);
      if (ls >> depth) manifest.depth_files.push_back(depth);
    } else {
      fail_parse(path, line_no, "unknown directive '" + word + "'");
    }
  }
  if (manifest.n_views <= 0 ||
      manifest.image_files.size() != static_cast<std::size_t>(manifest.n_views) ||
      manifest.mask_files.size() != static_cast<std::size_t>(manifest.n_views))
    throw std::runtime_error(path + ": view count does not match listed files");
  if (!manifest.depth_files.empty() &&
      manifest.depth_files.size() != static_cast<std::size_t>(manifest.n_views))
    throw std::runtime_error(path + ": depth files incomplete");
  return manifest;
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const DatasetManifest manifest = load_manifest(dir);

  Dataset data;
  data.cameras = load_cameras((fs::path(dir) / manifest.camera_file).string());
  if (data.cameras.size() != static_cast<std::size_t>(manifest.n_views))
    throw std::runtime_error("load_dataset: camera count disagrees with manifest");

  for (int i = 0; i < manifest.n_views; ++i) {
    data.images.push_back(
        read_png((fs::path(dir) / manifest.image_files[static_cast<std::size_t>(i)]).string()));
    data.masks.push_back(
        read_png((fs::path(dir) / manifest.mask_files[static_cast<std::size_t>(i)]).string()));
    const Image& img = data.images.back();
    if (img.width != manifest.width || img.height != manifest.height)
      throw std::runtime_error("load_dataset: image size disagrees with manifest");
    if (!manifest.depth_files.empty()) {
      const Image depth_img = read_pfm(
          (fs::path(dir) / manifest.depth_files[static_cast<std::size_t>(i)]).string());
      data.depths.push_back(depth_img.pixels.row(0).transpose());
    }
  }
  return data;
}

}  // namespace neusurf
