#pragma once

#include <string>
#include <vector>

#include "neusurf/core/types.hpp"

namespace neusurf {

// RGB image with doubles in [0,1]; pixels stored one per column, column
// index = y * width + x (row-major pixel order, y down).
struct Image {
  int width = 0, height = 0;
  Mat pixels;  // 3 x (width*height)

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(Mat::Zero(3, w * h)) {}

  Eigen::Index index(int x, int y) const {
    return static_cast<Eigen::Index>(y) * width + x;
  }
  Vec3 at(int x, int y) const { return pixels.col(index(x, y)); }
  void set(int x, int y, const Vec3& rgb) { pixels.col(index(x, y)) = rgb; }
};

// 8-bit RGB PNG.  Values are clamped to [0,1] and quantized with rounding on
// write; read maps {0..255} -> value/255.
void write_png(const std::string& path, const Image& img);
Image read_png(const std::string& path);

// PFM, 32-bit float RGB, little-endian (negative scale header), bottom-up
// row order per the format convention.  Lossless for float32 data.
void write_pfm(const std::string& path, const Image& img);
Image read_pfm(const std::string& path);

// Binary mask helpers: a pixel is "on" when any channel exceeds `threshold`.
std::vector<std::uint8_t> image_to_mask(const Image& img, Real threshold = 0.5);

}  // namespace neusurf
