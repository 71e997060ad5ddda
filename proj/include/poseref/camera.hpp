#pragma once

#include <Eigen/Core>

#include "poseref/errors.hpp"

namespace poseref {

/// Depth guard for projection; models crossing the camera plane are
/// rejected rather than clamped.
constexpr double kMinDepth = 1e-6;

/// Ideal pinhole, no distortion. Pixel coordinates are continuous with
/// integer pixel centers at integer coordinates.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
      throw InvalidArgumentError("intrinsics: focal lengths must be positive");
    }
    if (width <= 0 || height <= 0) {
      throw InvalidArgumentError("intrinsics: image size must be positive");
    }
  }
};

inline Eigen::Vector2d project(const Eigen::Vector3d& x,
                               const CameraIntrinsics& k) {
  if (!(x.z() > kMinDepth)) {
    throw BehindCameraError("project: point at or behind the camera plane");
  }
  return {k.fx * x.x() / x.z() + k.cx, k.fy * x.y() / x.z() + k.cy};
}

inline Eigen::Vector3d unproject(const Eigen::Vector2d& px, double depth,
                                 const CameraIntrinsics& k) {
  if (!(depth > kMinDepth)) {
    throw InvalidDepthError("unproject: depth at or behind the camera plane");
  }
  return {(px.x() - k.cx) * depth / k.fx, (px.y() - k.cy) * depth / k.fy,
          depth};
}

/// d(project)/dX, 2x3, pixels per meter.
inline Eigen::Matrix<double, 2, 3> project_jacobian(const Eigen::Vector3d& x,
                                                    const CameraIntrinsics& k) {
  if (!(x.z() > kMinDepth)) {
    throw BehindCameraError("project_jacobian: point at or behind the camera");
  }
  const double inv_z = 1.0 / x.z();
  const double inv_z2 = inv_z * inv_z;
  Eigen::Matrix<double, 2, 3> j;
  j << k.fx * inv_z, 0.0, -k.fx * x.x() * inv_z2,
       0.0, k.fy * inv_z, -k.fy * x.y() * inv_z2;
  return j;
}

inline bool in_image(const Eigen::Vector2d& px, const CameraIntrinsics& k) {
  return px.x() >= 0.0 && px.x() < static_cast<double>(k.width) &&
         px.y() >= 0.0 && px.y() < static_cast<double>(k.height);
}

}  // namespace poseref
