#include "neusurf/render/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace neusurf {

void Camera::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("Camera: non-positive image size");
  if (!(fx > 0.0) || !(fy > 0.0))
    throw std::invalid_argument("Camera: focal lengths must be positive");
  if (((rotation.transpose() * rotation) - Mat3::Identity()).cwiseAbs().maxCoeff() >
      1e-6)
    throw std::invalid_argument("Camera: rotation is not orthonormal");
}

Camera Camera::look_at(const Vec3& pos, const Vec3& target, const Vec3& up,
                       int width, int height, Real fov_x_deg) {
  Vec3 forward = target - pos;
  if (forward.norm() < 1e-12)
    throw std::invalid_argument("Camera::look_at: position equals target");
  forward.normalize();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9)
    throw std::invalid_argument("Camera::look_at: up parallel to view axis");
  right.normalize();
  const Vec3 down = forward.cross(right);  // unit by construction

  Camera cam;
  cam.width = width;
  cam.height = height;
  cam.rotation.col(0) = right;
  cam.rotation.col(1) = down;
  cam.rotation.col(2) = forward;
  cam.position = pos;
  const Real half = 0.5 * fov_x_deg * 3.141592653589793238462643383279502884 / 180.0;
  cam.fx = (0.5 * width) / std::tan(half);
  cam.fy = cam.fx;  // square pixels
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.validate();
  return cam;
}

Vec3 Camera::direction_through(Real u, Real v) const {
  Vec3 d_cam((u - cx) / fx, (v - cy) / fy, 1.0);
  return (rotation * d_cam).normalized();
}

bool Camera::project(const Vec3& p_world, Real* u, Real* v) const {
  const Vec3 p_cam = rotation.transpose() * (p_world - position);
  if (p_cam.z() <= 0.0) return false;
  if (u) *u = fx * p_cam.x() / p_cam.z() + cx;
  if (v) *v = fy * p_cam.y() / p_cam.z() + cy;
  return true;
}

namespace {

// Near/far from the unit bounding sphere; flags rays that miss entirely.
void set_domain_interval(Ray& ray) {
  const Real b = ray.origin.dot(ray.dir);
  const Real c = ray.origin.squaredNorm() - 1.0;
  const Real disc = b * b - c;
  ray.hits_domain = false;
  if (disc <= 0.0) return;
  const Real root = std::sqrt(disc);
  const Real t0 = -b - root, t1 = -b + root;
  if (t1 <= 0.0) return;
  ray.t_near = std::max(t0, static_cast<Real>(1e-4));
  ray.t_far = t1;
  ray.hits_domain = ray.t_near < ray.t_far;
}

}  // namespace

std::vector<Ray> generate_rays(const Camera& camera,
                               const std::vector<std::pair<int, int>>& pixels) {
  camera.validate();
  std::vector<Ray> rays;
  rays.reserve(pixels.size());
  for (const auto& [ix, iy] : pixels) {
    if (ix < 0 || iy < 0 || ix >= camera.width || iy >= camera.height)
      throw std::out_of_range("generate_rays: pixel outside image bounds");
    rays.push_back(ray_through(camera, ix + 0.5, iy + 0.5));
  }
  return rays;
}

Ray ray_through(const Camera& camera, Real u, Real v) {
  Ray ray;
  ray.origin = camera.position;
  ray.dir = camera.direction_through(u, v);
  set_domain_interval(ray);
  return ray;
}

}  // namespace neusurf
