#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neusurf/core/rng.hpp"
#include "neusurf/render/camera.hpp"
#include "neusurf/render/image.hpp"
#include "neusurf/scene/primitives.hpp"

namespace neusurf {

// Ring capture rig: cameras evenly spaced in azimuth on a circle of the
// given radius, raised by `elevation` radians above the target's horizontal
// plane, all aimed at the target.
struct DatasetConfig {
  int n_views = 24;
  int width = 64, height = 64;
  Real fov_x_deg = 55.0;
  Real radius = 1.6;
  Real elevation = 0.32;        // radians
  Real elevation_jitter = 0.0;  // uniform +-jitter added per view (radians)
  Vec3 target = Vec3::Zero();
  Vec3 up = Vec3(0.0, 1.0, 0.0);
  std::uint64_t seed = 1;       // drives the jitter only
  bool save_depth = false;      // also emit depth_###.pfm on save
};

struct Dataset {
  std::vector<Camera> cameras;
  std::vector<Image> images;  // shaded renders of the full scene
  std::vector<Image> masks;   // silhouettes of the foreground scene
  std::vector<Vec> depths;    // full-scene trace depth, 0 on miss
};

// The rig's poses alone (deterministic given the config).
std::vector<Camera> ring_cameras(const DatasetConfig& config);

// Renders every rig view.  Images come from the whole scene; masks are the
// exact hit masks of the foreground subset (for a scene without clutter the
// two tracings coincide).  Throws unless n_views >= 3.
Dataset generate_dataset(const Scene& scene, const DatasetConfig& config);

// What a saved dataset directory contains.
struct DatasetManifest {
  int n_views = 0;
  int width = 0, height = 0;
  std::string camera_file;
  std::vector<std::string> image_files;
  std::vector<std::string> mask_files;
  std::vector<std::string> depth_files;  // may be empty
  std::string scale_note;
  std::string split_note;
};

// Plain-text camera file (documented in docs/FORMATS.md): per view the image
// size, intrinsics, and the 4x4 world-from-camera pose, full 17-digit
// precision so reloading reproduces every double exactly.
void save_cameras(const std::vector<Camera>& cameras, const std::string& path);
std::vector<Camera> load_cameras(const std::string& path);

// Writes view_###.png, mask_###.png, optional depth_###.pfm, cameras.txt,
// and manifest.txt into `dir` (created if needed).  Returns the manifest.
DatasetManifest save_dataset(const Dataset& dataset, const std::string& dir,
                             bool with_depth = false);

DatasetManifest load_manifest(const std::string& dir);

// Reads a directory written by save_dataset (or anything matching the
// manifest schema).  Images come back exactly as stored: PNG quantizes to
// 8 bits on save, so a save/load/save cycle is byte-stable.
Dataset load_dataset(const std::string& dir);

}  // namespace neusurf
