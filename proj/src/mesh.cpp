#include "neusurf/mesh/mesh.hpp"

#include <stdexcept>

#include "neusurf/mesh/coloring.hpp"

namespace neusurf {

void TriangleMesh::validate() const {
  if (vertices.rows() != 3)
    throw std::invalid_argument("TriangleMesh: vertices must be 3 x V");
  if (triangles.rows() != 3)
    throw std::invalid_argument("TriangleMesh: triangles must be 3 x F");
  if (!vertices.allFinite())
    throw std::invalid_argument("TriangleMesh: non-finite vertex coordinate");
  const int v = vertex_count();
  for (int t = 0; t < triangle_count(); ++t) {
    const int a = triangles(0, t), b = triangles(1, t), c = triangles(2, t);
    if (a < 0 || a >= v || b < 0 || b >= v || c < 0 || c >= v)
      throw std::invalid_argument("TriangleMesh: triangle index out of range");
    if (a == b || b == c || a == c)
      throw std::invalid_argument("TriangleMesh: degenerate triangle (repeated index)");
  }
  if (colors.cols() > 0 && (colors.rows() != 3 || colors.cols() != v))
    throw std::invalid_argument("TriangleMesh: colors must be empty or 3 x V");
  if (normals.cols() > 0 && (normals.rows() != 3 || normals.cols() != v))
    throw std::invalid_argument("TriangleMesh: normals must be empty or 3 x V");
}

void vertex_colors(TriangleMesh& mesh, const SdfField& sdf, const ColorField& color) {
  if (mesh.empty())
    throw std::invalid_argument("vertex_colors: empty mesh");

  Mat features, gradient;
  sdf.eval_plain(mesh.vertices, nullptr, &features, &gradient);

  // Surface normal = normalized SDF gradient.  A vanishing gradient (only
  // possible far from a well-trained zero set) is passed through unscaled;
  // the radiance field guards zero-norm normals itself.
  Mat normals = gradient;
  for (Eigen::Index i = 0; i < normals.cols(); ++i) {
    const Real n = normals.col(i).norm();
    if (n > 1e-12) normals.col(i) /= n;
  }
  const Mat dirs = -normals;

  mesh.colors = color.eval_plain(mesh.vertices, dirs, normals, features);
  mesh.normals = normals;
}

}  // namespace neusurf
