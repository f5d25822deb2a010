#pragma once

#include <functional>

#include "neusurf/core/types.hpp"
#include "neusurf/fields/sdf_field.hpp"

namespace neusurf {

// Dense scalar samples of a signed-distance field on a regular lattice over
// the cube [-1,1]^3, endpoints included.  values[index(ix,iy,iz)] holds the
// field at (coord(ix), coord(iy), coord(iz)); x varies fastest, then y,
// then z.
struct SdfGrid {
  int res = 0;  // samples per axis, >= 8
  Vec values;   // res^3 entries

  Real cell() const { return 2.0 / static_cast<Real>(res - 1); }
  Real coord(int i) const { return -1.0 + cell() * static_cast<Real>(i); }

  std::ptrdiff_t index(int ix, int iy, int iz) const {
    return static_cast<std::ptrdiff_t>(ix) +
           static_cast<std::ptrdiff_t>(res) *
               (static_cast<std::ptrdiff_t>(iy) +
                static_cast<std::ptrdiff_t>(res) * static_cast<std::ptrdiff_t>(iz));
  }
  Real value(int ix, int iy, int iz) const { return values(index(ix, iy, iz)); }
  Vec3 point(int ix, int iy, int iz) const {
    return Vec3(coord(ix), coord(iy), coord(iz));
  }
};

// Evaluates the network field over the lattice, one z-slab of res^2 points
// per batched forward pass.  Throws std::invalid_argument if res < 8.
SdfGrid sample_sdf_grid(const SdfField& field, int res);

// Same lattice filled from an arbitrary scalar function (analytic fields,
// test oracles).  Shares every layout convention with the field overload.
SdfGrid sample_sdf_grid(const std::function<Real(const Vec3&)>& f, int res);

}  // namespace neusurf
