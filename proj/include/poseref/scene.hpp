#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "poseref/camera.hpp"
#include "poseref/errors.hpp"
#include "poseref/field.hpp"
#include "poseref/model.hpp"
#include "poseref/rng.hpp"
#include "poseref/se3.hpp"

namespace poseref {

/// One projected model vertex of the reference view: image location and
/// rendered depth.
struct ViewPoint {
  int model_index = -1;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  double depth = 0.0;
};

/// Reference "rendering" at desk scale: per-vertex point projection, no
/// rasterization and no self-occlusion.
struct RenderedView {
  std::vector<ViewPoint> points;
  PoseSE3 pose;
};

inline RenderedView render_view(const ObjectModel& model, const PoseSE3& pose,
                                const CameraIntrinsics& k) {
  RenderedView view;
  view.pose = pose;
  view.points.reserve(model.vertices.size());
  for (std::size_t i = 0; i < model.vertices.size(); ++i) {
    const Eigen::Vector3d x = pose.apply(model.vertices[i]);
    if (!(x.z() > kMinDepth)) {
      throw BehindCameraError("render_view: vertex at or behind camera");
    }
    const Eigen::Vector2d px = project(x, k);
    if (!in_image(px, k)) continue;  // invisible, dropped
    view.points.push_back({static_cast<int>(i), px, x.z()});
  }
  if (view.points.empty()) {
    throw EmptyViewError("render_view: no vertex projects inside the image");
  }
  return view;
}

/// Correspondence field derived from a residual pose: for each reference
/// entry, C(x) = project(delta * unproject(x, z)). Targets outside the
/// image bounds are kept but marked invalid.
inline CorrespondenceField field_from_pose(const RenderedView& view,
                                           const PoseSE3& delta,
                                           const CameraIntrinsics& k) {
  CorrespondenceField field;
  field.targets.reserve(view.points.size());
  field.valid.reserve(view.points.size());
  for (const auto& p : view.points) {
    const Eigen::Vector3d x = delta.apply(unproject(p.pixel, p.depth, k));
    if (!(x.z() > kMinDepth)) {
      throw BehindCameraError("field_from_pose: transformed point behind camera");
    }
    const Eigen::Vector2d target = project(x, k);
    field.targets.push_back(target);
    field.valid.push_back(in_image(target, k) ? 1 : 0);
  }
  return field;
}

inline CorrespondenceField ground_truth_field(const RenderedView& view,
                                              const PoseSE3& delta_gt,
                                              const CameraIntrinsics& k) {
  return field_from_pose(view, delta_gt, k);
}

/// Identity field: every reference point maps to itself (zero flow).
inline CorrespondenceField identity_field(const RenderedView& view) {
  CorrespondenceField field;
  field.targets.reserve(view.points.size());
  field.valid.assign(view.points.size(), 1);
  for (const auto& p : view.points) field.targets.push_back(p.pixel);
  return field;
}

/// Initial-pose noise model: per-axis Gaussian Euler-angle perturbation of
/// the rotation (intrinsic XYZ order, left-composed) and additive Gaussian
/// translation noise in the camera frame (z = optical axis).
struct NoiseSpec {
  double rot_std_deg = 10.0;
  double trans_std_x = 0.03;   // meters
  double trans_std_y = 0.03;   // meters
  double trans_std_z = 0.15;   // meters

  void validate() const {
    if (rot_std_deg < 0.0 || trans_std_x < 0.0 || trans_std_y < 0.0 ||
        trans_std_z < 0.0) {
      throw InvalidArgumentError("noise spec: standard deviations must be >= 0");
    }
  }
};

struct SceneSpec {
  ObjectModel model;
  CameraIntrinsics intrinsics;
  double min_distance = 0.7;      // meters along the optical axis
  double max_distance = 1.1;      // meters
  double lateral_extent = 0.05;   // meters, uniform in x and y
  NoiseSpec noise;

  void validate() const {
    intrinsics.validate();
    noise.validate();
    if (!(min_distance > kMinDepth) || !(max_distance >= min_distance)) {
      throw InvalidArgumentError("scene spec: bad distance range");
    }
    if (lateral_extent < 0.0) {
      throw InvalidArgumentError("scene spec: lateral extent must be >= 0");
    }
  }
};

/// A benchmark trial: ground-truth pose plus the noisy pose handed to the
/// refiner. Immutable after construction; deterministic per seed.
struct Scene {
  ObjectModel model;
  CameraIntrinsics intrinsics;
  PoseSE3 gt_pose;
  PoseSE3 init_pose;
  std::uint64_t seed = 0;
};

namespace detail {

inline Eigen::Matrix3d euler_xyz(double ax, double ay, double az) {
  return (Eigen::AngleAxisd(ax, Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(ay, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(az, Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

inline bool fully_visible(const ObjectModel& model, const PoseSE3& pose,
                          const CameraIntrinsics& k) {
  for (const auto& v : model.vertices) {
    const Eigen::Vector3d x = pose.apply(v);
    if (!(x.z() > kMinDepth)) return false;
    if (!in_image(project(x, k), k)) return false;
  }
  return true;
}

}  // namespace detail

/// Samples a ground-truth pose placing the model fully inside the frustum
/// (up to 100 attempts), then perturbs it into the initial pose estimate.
inline Scene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto eng = rng::make_engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PoseSE3 gt;
  bool placed = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    gt.rotation = rng::random_rotation(eng);
    const double z =
        spec.min_distance + (spec.max_distance - spec.min_distance) * unit(eng);
    const double x = spec.lateral_extent * (2.0 * unit(eng) - 1.0);
    const double y = spec.lateral_extent * (2.0 * unit(eng) - 1.0);
    gt.translation = {x, y, z};
    if (detail::fully_visible(spec.model, gt, spec.intrinsics)) {
      placed = true;
      break;
    }
  }
  if (!placed) {
    throw SceneGenerationError(
        "generate_scene: no fully visible placement in 100 attempts");
  }

  const double rot_std = spec.noise.rot_std_deg * M_PI / 180.0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double ax = rot_std * gauss(eng);
  const double ay = rot_std * gauss(eng);
  const double az = rot_std * gauss(eng);
  const Eigen::Vector3d dt(spec.noise.trans_std_x * gauss(eng),
                           spec.noise.trans_std_y * gauss(eng),
                           spec.noise.trans_std_z * gauss(eng));

  Scene scene;
  scene.model = spec.model;
  scene.intrinsics = spec.intrinsics;
  scene.gt_pose = gt;
  scene.init_pose.rotation = detail::euler_xyz(ax, ay, az) * gt.rotation;
  scene.init_pose.translation = gt.translation + dt;
  scene.seed = seed;
  return scene;
}

}  // namespace poseref
