#pragma once

#include <Eigen/Dense>

#include "neusurf/core/types.hpp"

namespace neusurf {

// Triangle index triples, one column per triangle.
using TriBatch = Eigen::Matrix<int, 3, Eigen::Dynamic>;

// Indexed triangle mesh in scene units.  Triangles are wound so the
// geometric normal (b - a) x (c - a) points toward increasing signed
// distance, i.e. outward for positive-outside fields.  Optional per-vertex
// attributes are either empty or hold one column per vertex.
struct TriangleMesh {
  Mat vertices;       // 3 x V positions
  TriBatch triangles; // 3 x F vertex indices
  Mat colors;         // 3 x V rgb in [0,1], or 3 x 0
  Mat normals;        // 3 x V unit normals, or 3 x 0

  int vertex_count() const { return static_cast<int>(vertices.cols()); }
  int triangle_count() const { return static_cast<int>(triangles.cols()); }
  bool empty() const { return vertices.cols() == 0; }

  bool has_colors() const { return colors.cols() > 0; }
  bool has_normals() const { return normals.cols() > 0; }

  // Throws std::invalid_argument if any structural invariant is broken:
  // indices out of range, a triangle repeating a vertex index, non-finite
  // coordinates, or attribute matrices of the wrong shape.
  void validate() const;
};

}  // namespace neusurf
