#include "neusurf/train/train_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace neusurf {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Real parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const Real v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("train config: bad number '" + value + "' for " + key);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("train config: bad integer '" + value + "' for " + key);
  }
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("train config: " + what);
  };
  if (iterations < 1) fail("iterations must be >= 1");
  if (!(learning_rate > 0)) fail("learning_rate must be > 0");
  if (warmup_iterations < 1) fail("warmup_iterations must be >= 1");
  if (!(lr_floor > 0 && lr_floor <= 1)) fail("lr_floor must be in (0, 1]");
  if (rays_per_batch < 1) fail("rays_per_batch must be >= 1");
  if (coarse_samples < 2) fail("coarse_samples must be >= 2");
  if (fine_samples < 0) fail("fine_samples must be >= 0");
  if (!(w_eik >= 0)) fail("w_eik must be >= 0");
  if (!(w_geo >= 0)) fail("w_geo must be >= 0");
  if (!(w_surf >= 0)) fail("w_surf must be >= 0");
  if (!(w_global >= 0)) fail("w_global must be >= 0");
  if (!(w_curv >= 0)) fail("w_curv must be >= 0");
  if (refresh_period_views < 1) fail("refresh_period_views must be >= 1");
  if (grid_resolution < 2) fail("grid_resolution must be >= 2");
  if (!(contrast >= 0)) fail("contrast must be >= 0");
  if (!(s_min > 0)) fail("s_min must be > 0");
  if (!(s_init > s_min)) fail("s_init must exceed s_min");
  if (curvature_points < 1) fail("curvature_points must be >= 1");
  if (!(curvature_fd_step > 0)) fail("curvature_fd_step must be > 0");
  if (!(background >= 0 && background <= 1)) fail("background must be in [0, 1]");
  if (sdf.encoding_levels < 0) fail("sdf_encoding_levels must be >= 0");
  if (sdf.hidden_width < 1) fail("sdf_hidden_width must be >= 1");
  if (sdf.n_hidden < 1) fail("sdf_hidden_layers must be >= 1");
  if (sdf.feature_width < 1) fail("sdf_feature_width must be >= 1");
  if (!(sdf.softplus_beta > 0)) fail("sdf_softplus_beta must be > 0");
  if (!(sdf.init_radius > 0)) fail("sdf_init_radius must be > 0");
  if (color.hidden_width < 1) fail("color_hidden_width must be >= 1");
  if (color.n_hidden < 1) fail("color_hidden_layers must be >= 1");
  if (color.dir_encoding_levels < 0) fail("color_dir_encoding_levels must be >= 0");
  if (color.feature_width != sdf.feature_width)
    fail("color feature width must match sdf_feature_width");
}

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("train config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("train config: line " + std::to_string(line_no) +
                                  " has an empty key or value");

    if (key == "iterations") cfg.iterations = static_cast<int>(parse_int(key, value));
    else if (key == "learning_rate") cfg.learning_rate = parse_real(key, value);
    else if (key == "warmup_iterations")
      cfg.warmup_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "lr_floor") cfg.lr_floor = parse_real(key, value);
    else if (key == "rays_per_batch")
      cfg.rays_per_batch = static_cast<int>(parse_int(key, value));
    else if (key == "coarse_samples")
      cfg.coarse_samples = static_cast<int>(parse_int(key, value));
    else if (key == "fine_samples")
      cfg.fine_samples = static_cast<int>(parse_int(key, value));
    else if (key == "w_eik") cfg.w_eik = parse_real(key, value);
    else if (key == "w_geo") cfg.w_geo = parse_real(key, value);
    else if (key == "w_surf") cfg.w_surf = parse_real(key, value);
    else if (key == "w_global") cfg.w_global = parse_real(key, value);
    else if (key == "w_curv") cfg.w_curv = parse_real(key, value);
    else if (key == "variant") {
      if (value == "neus") cfg.with_curvature = false;
      else if (value == "neus_curvature") cfg.with_curvature = true;
      else
        throw std::invalid_argument(
            "train config: variant must be 'neus' or 'neus_curvature', got '" + value +
            "'");
    } else if (key == "refresh_period_views")
      cfg.refresh_period_views = static_cast<int>(parse_int(key, value));
    else if (key == "grid_resolution")
      cfg.grid_resolution = static_cast<int>(parse_int(key, value));
    else if (key == "contrast") cfg.contrast = parse_real(key, value);
    else if (key == "s_init") cfg.s_init = parse_real(key, value);
    else if (key == "s_min") cfg.s_min = parse_real(key, value);
    else if (key == "curvature_points")
      cfg.curvature_points = static_cast<int>(parse_int(key, value));
    else if (key == "curvature_fd_step") cfg.curvature_fd_step = parse_real(key, value);
    else if (key == "background") cfg.background = parse_real(key, value);
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "sdf_encoding_levels")
      cfg.sdf.encoding_levels = static_cast<int>(parse_int(key, value));
    else if (key == "sdf_hidden_width")
      cfg.sdf.hidden_width = static_cast<int>(parse_int(key, value));
    else if (key == "sdf_hidden_layers")
      cfg.sdf.n_hidden = static_cast<int>(parse_int(key, value));
    else if (key == "sdf_feature_width")
      cfg.sdf.feature_width = static_cast<int>(parse_int(key, value));
    else if (key == "sdf_softplus_beta") cfg.sdf.softplus_beta = parse_real(key, value);
    else if (key == "sdf_init_radius") cfg.sdf.init_radius = parse_real(key, value);
    else if (key == "color_hidden_width")
      cfg.color.hidden_width = static_cast<int>(parse_int(key, value));
    else if (key == "color_hidden_layers")
      cfg.color.n_hidden = static_cast<int>(parse_int(key, value));
    else if (key == "color_dir_encoding_levels")
      cfg.color.dir_encoding_levels = static_cast<int>(parse_int(key, value));
    else
      throw std::invalid_argument("train config: unknown key '" + key + "' on line " +
                                  std::to_string(line_no));
  }
  // The color network consumes the SDF feature vector; the widths are one
  // setting, not two.
  cfg.color.feature_width = cfg.sdf.feature_width;
  return cfg;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_train_config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_train_config(text.str());
}

}  // namespace neusurf
