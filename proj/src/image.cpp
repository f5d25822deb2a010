#include "neusurf/render/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace neusurf {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const std::string& path, const Image& img) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("write_png: empty image");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("write_png: cannot open " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  if (!png) throw std::runtime_error("write_png: png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("write_png: png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: libpng error writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const Vec3 c = img.at(x, y);
      for (int ch = 0; ch < 3; ++ch) {
        Real v = c(ch);
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        row[static_cast<std::size_t>(x) * 3 + ch] =
            static_cast<png_byte>(std::lround(v * 255.0));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("read_png: cannot open " + path);
  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw std::runtime_error("read_png: not a PNG file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, nullptr);
  if (!png) throw std::runtime_error("read_png: png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("read_png: png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("read_png: libpng error reading " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  // normalize any input flavor to 8-bit RGB
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("read_png: unexpected row layout in " + path);
  }

  Image img(width, height);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 3);
  for (int y = 0; y < height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < width; ++x)
      img.set(x, y,
              Vec3(row[static_cast<std::size_t>(x) * 3 + 0] / 255.0,
                   row[static_cast<std::size_t>(x) * 3 + 1] / 255.0,
                   row[static_cast<std::size_t>(x) * 3 + 2] / 255.0));
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_pfm(const std::string& path, const Image& img) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("write_pfm: empty image");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_pfm: cannot open " + path);
  os << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
  // PFM stores rows bottom-up
  std::vector<float> row(static_cast<std::size_t>(img.width) * 3);
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x) {
      const Vec3 c = img.at(x, y);
      for (int ch = 0; ch < 3; ++ch)
        row[static_cast<std::size_t>(x) * 3 + ch] = static_cast<float>(c(ch));
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!os) throw std::runtime_error("write_pfm: write failed: " + path);
}

Image read_pfm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_pfm: cannot open " + path);
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
  is >> magic >> width >> height >> scale;
  if (magic != "PF" || width <= 0 || height <= 0)
    throw std::runtime_error("read_pfm: bad header in " + path);
  if (scale >= 0.0)
    throw std::runtime_error("read_pfm: big-endian PFM unsupported: " + path);
  is.get();  // single whitespace after the scale line

  Image img(width, height);
  std::vector<float> row(static_cast<std::size_t>(width) * 3);
  for (int y = height - 1; y >= 0; --y) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!is) throw std::runtime_error("read_pfm: truncated file: " + path);
    for (int x = 0; x < width; ++x)
      img.set(x, y,
              Vec3(row[static_cast<std::size_t>(x) * 3 + 0],
                   row[static_cast<std::size_t>(x) * 3 + 1],
                   row[static_cast<std::size_t>(x) * 3 + 2]));
  }
  return img;
}

std::vector<std::uint8_t> image_to_mask(const Image& img, Real threshold) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(img.width) * img.height);
  for (Eigen::Index j = 0; j < img.pixels.cols(); ++j)
    mask[static_cast<std::size_t>(j)] =
        img.pixels.col(j).maxCoeff() > threshold ? 1 : 0;
  return mask;
}

}  // namespace neusurf
