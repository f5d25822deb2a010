#pragma once

#include "neusurf/mesh/mesh.hpp"
#include "neusurf/mesh/sdf_grid.hpp"

namespace neusurf {

// Standard 256-case lookup-table marching cubes with linear edge
// interpolation.  Vertices are deduplicated across cells (keyed by the
// lattice edge they sit on, or by the lattice point itself when a grid value
// equals `iso` exactly), so the mesh is watertight wherever the field
// crosses the isovalue transversally: every interior edge bounds exactly two
// triangles.  Triangles are wound so the geometric normal points toward
// values above `iso` (along +grad f for signed distance fields).
//
// Vertex indices are assigned in deterministic encounter order: cells are
// scanned z-major (z outermost, then y, then x), and within a cell the
// twelve edges are visited in fixed table order.
//
// A grid whose values are all on one side of `iso` yields an empty mesh.
TriangleMesh marching_cubes(const SdfGrid& grid, Real iso = 0.0);

}  // namespace neusurf
