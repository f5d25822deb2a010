#include "neusurf/mesh/sdf_grid.hpp"

#include <stdexcept>

namespace neusurf {

namespace {

SdfGrid make_grid(int res) {
  if (res < 8) throw std::invalid_argument("sample_sdf_grid: resolution must be >= 8");
  SdfGrid grid;
  grid.res = res;
  grid.values.resize(static_cast<Eigen::Index>(res) * res * res);
  return grid;
}

}  // namespace

SdfGrid sample_sdf_grid(const SdfField& field, int res) {
  SdfGrid grid = make_grid(res);
  const Eigen::Index slab = static_cast<Eigen::Index>(res) * res;
  Mat points(3, slab);
  for (int iz = 0; iz < res; ++iz) {
    Eigen::Index n = 0;
    for (int iy = 0; iy < res; ++iy)
      for (int ix = 0; ix < res; ++ix) points.col(n++) = grid.point(ix, iy, iz);
    const Mat sdf = field.sdf_plain(points);  // 1 x slab
    grid.values.segment(static_cast<Eigen::Index>(iz) * slab, slab) =
        sdf.row(0).transpose();
  }
  return grid;
}

SdfGrid sample_sdf_grid(const std::function<Real(const Vec3&)>& f, int res) {
  SdfGrid grid = make_grid(res);
  for (int iz = 0; iz < res; ++iz)
    for (int iy = 0; iy < res; ++iy)
      for (int ix = 0; ix < res; ++ix)
        grid.values(grid.index(ix, iy, iz)) = f(grid.point(ix, iy, iz));
  return grid;
}

}  // namespace neusurf
