#pragma once

#include <map>
#include <string>
#include <vector>

#include "neusurf/core/types.hpp"

namespace neusurf {

// Minimal named-array container, little-endian binary.  See docs/FORMATS.md.
//
// Layout:
//   magic   "NSTC"            (4 bytes)
//   version u32 = 1
//   count   u32
//   then per entry:
//     name_len u32, name bytes (no NUL)
//     kind     u32  (0 = f64 matrix, 1 = utf-8 string blob)
//     rows u64, cols u64      (string blobs: rows = byte length, cols = 1)
//     payload: rows*cols doubles column-major, or raw bytes
//
// Matrices keep full double precision, so save/load round-trips are
// bit-exact.  Strings carry RNG engine states and free-form metadata.
class TensorFile {
 public:
  void put(const std::string& name, const Mat& m);
  void put_string(const std::string& name, const std::string& s);

  bool has(const std::string& name) const;
  const Mat& get(const std::string& name) const;            // throws if absent
  const std::string& get_string(const std::string& name) const;
  std::vector<std::string> names() const;

  void save(const std::string& path) const;
  static TensorFile load(const std::string& path);

 private:
  std::map<std::string, Mat> mats_;          // ordered: deterministic files
  std::map<std::string, std::string> strings_;
};

}  // namespace neusurf
