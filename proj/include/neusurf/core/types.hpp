#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace neusurf {

// All numerics run in double precision.  The pipeline is small enough that
// the memory cost is irrelevant, and double keeps the finite-difference
// gradient checks and the bit-exact replay contracts comfortable.
using Real = double;

using Mat = Eigen::MatrixXd;                     // dense, column-major
using Vec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Batches of points/directions are stored one column per element (3 x N).
// Column-major Eigen makes per-element access contiguous this way, and it
// matches how network activations are laid out (features in rows).
using PointBatch = Eigen::Matrix<Real, 3, Eigen::Dynamic>;

}  // namespace neusurf
