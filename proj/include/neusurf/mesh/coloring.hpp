#pragma once

#include "neusurf/fields/color_field.hpp"
#include "neusurf/fields/sdf_field.hpp"
#include "neusurf/mesh/mesh.hpp"

namespace neusurf {

// Assigns each vertex the radiance-field color at its position, using the
// normalized SDF gradient as the surface normal and a view direction looking
// straight down that normal (dir = -normal).  Fills mesh.colors and
// mesh.normals.  Throws std::invalid_argument on an empty mesh.
void vertex_colors(TriangleMesh& mesh, const SdfField& sdf, const ColorField& color);

}  // namespace neusurf
