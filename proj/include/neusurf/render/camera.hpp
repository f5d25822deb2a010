#pragma once

#include <utility>
#include <vector>

#include "neusurf/core/types.hpp"

namespace neusurf {

// Pinhole camera.  Convention: camera looks down +z in its own frame, x
// right, y down (image row index grows downward); `rotation` maps
// camera-frame vectors to world frame (columns are the camera axes in world
// coordinates), `position` is the camera center in world coordinates.
struct Camera {
  int width = 0, height = 0;
  Real fx = 0, fy = 0, cx = 0, cy = 0;
  Mat3 rotation = Mat3::Identity();  // world-from-camera
  Vec3 position = Vec3::Zero();

  // Throws unless fx,fy > 0, sizes positive, rotation orthonormal (1e-6).
  void validate() const;

  // Camera centered at `pos` looking at `target`; `fov_x_deg` is the full
  // horizontal field of view.  `up` must not be parallel to the view axis.
  static Camera look_at(const Vec3& pos, const Vec3& target, const Vec3& up,
                        int width, int height, Real fov_x_deg);

  Vec3 optical_axis() const { return rotation.col(2); }

  // World-frame unit direction through continuous image point (u, v) in
  // pixel units ((cx, cy) gives the optical axis).
  Vec3 direction_through(Real u, Real v) const;

  // Projects a world point; returns false if the point is behind the camera.
  bool project(const Vec3& p_world, Real* u, Real* v) const;
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 dir = Vec3::UnitZ();     // unit length
  Real t_near = 0.0, t_far = 0.0;
  bool hits_domain = false;  // false: never enters the unit bounding sphere
};

// Rays through pixel centers (ix+0.5, iy+0.5).  Near/far come from
// intersecting the unit bounding sphere; rays that miss it are returned with
// hits_domain = false (the scene lives in [-1,1]^3 by convention and such
// rays render as pure background).  Out-of-bounds pixel indices throw.
std::vector<Ray> generate_rays(const Camera& camera,
                               const std::vector<std::pair<int, int>>& pixels);

// Single ray through an arbitrary continuous image point.
Ray ray_through(const Camera& camera, Real u, Real v);

}  // namespace neusurf
