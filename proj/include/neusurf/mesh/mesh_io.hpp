#pragma once

#include <string>

#include "neusurf/mesh/mesh.hpp"

namespace neusurf {

enum class MeshFormat {
  kPlyAscii,   // text PLY, doubles printed at 17 significant digits
  kPlyBinary,  // binary_little_endian PLY, doubles round-trip bit-exactly
  kObj,        // Wavefront OBJ (positions + normals; colors are dropped)
};

// Writes `mesh` to `path`.  Positions (and normals, when present) are stored
// as doubles; colors as 8-bit red/green/blue.  An empty mesh produces a
// valid file with zero elements.  Throws std::runtime_error naming the path
// on I/O failure.
void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format);

// Reads a mesh written by save_mesh (both PLY flavors and OBJ; float PLY
// positions from other tools are also accepted).  The format is detected
// from the file contents.  Throws std::runtime_error on malformed input.
TriangleMesh load_mesh(const std::string& path);

}  // namespace neusurf
