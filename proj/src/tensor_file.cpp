#include "neusurf/core/tensor_file.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace neusurf {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void TensorFile::put(const std::string& name, const Mat& m) {
  if (strings_.count(name))
    throw std::invalid_argument("TensorFile: name already used for a string: " + name);
  mats_[name] = m;
}

void TensorFile::put_string(const std::string& name, const std::string& s) {
  if (mats_.count(name))
    throw std::invalid_argument("TensorFile: name already used for a matrix: " + name);
  strings_[name] = s;
}

bool TensorFile::has(const std::string& name) const {
  return mats_.count(name) > 0 || strings_.count(name) > 0;
}

const Mat& TensorFile::get(const std::string& name) const {
  auto it = mats_.find(name);
  if (it == mats_.end())
    throw std::out_of_range("TensorFile: no matrix named '" + name + "'");
  return it->second;
}

const std::string& TensorFile::get_string(const std::string& name) const {
  auto it = strings_.find(name);
  if (it == strings_.end())
    throw std::out_of_range("TensorFile: no string named '" + name + "'");
  return it->second;
}

std::vector<std::string> TensorFile::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : mats_) out.push_back(k);
  for (const auto& [k, v] : strings_) out.push_back(k);
  return out;
}

void TensorFile::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("TensorFile: cannot open for write: " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(mats_.size() + strings_.size()));
  for (const auto& [name, m] : mats_) {
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, 0);
    write_u64(os, static_cast<std::uint64_t>(m.rows()));
    write_u64(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(Real) * m.size()));
  }
  for (const auto& [name, s] : strings_) {
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, 1);
    write_u64(os, static_cast<std::uint64_t>(s.size()));
    write_u64(os, 1);
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  if (!os) throw std::runtime_error("TensorFile: write failed: " + path);
}

TensorFile TensorFile::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("TensorFile: cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("TensorFile: bad magic in " + path);
  std::uint32_t version = read_u32(is);
  if (version != kVersion)
    throw std::runtime_error("TensorFile: unsupported version in " + path);
  std::uint32_t count = read_u32(is);
  TensorFile tf;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = read_u32(is);
    if (!is || name_len > (1u << 20))
      throw std::runtime_error("TensorFile: corrupt entry header in " + path);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    std::uint32_t kind = read_u32(is);
    std::uint64_t rows = read_u64(is);
    std::uint64_t cols = read_u64(is);
    if (!is) throw std::runtime_error("TensorFile: truncated file: " + path);
    if (kind == 0) {
      if (rows * cols > (1ull << 31))
        throw std::runtime_error("TensorFile: implausible matrix size in " + path);
      Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      is.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(sizeof(Real) * m.size()));
      tf.mats_[name] = std::move(m);
    } else if (kind == 1) {
      std::string s(static_cast<std::size_t>(rows), '\0');
      is.read(s.data(), static_cast<std::streamsize>(rows));
      tf.strings_[name] = std::move(s);
    } else {
      throw std::runtime_error("TensorFile: unknown entry kind in " + path);
    }
    if (!is) throw std::runtime_error("TensorFile: truncated payload in " + path);
  }
  return tf;
}

}  // namespace neusurf
