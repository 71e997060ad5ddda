#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>

#include "poseref/errors.hpp"

namespace poseref {

/// Minimal se(3) element. Ordering convention throughout this library:
/// translational part first, (rho; phi). All Jacobians use this ordering.
struct Twist {
  Eigen::Vector3d rho = Eigen::Vector3d::Zero();  // meters
  Eigen::Vector3d phi = Eigen::Vector3d::Zero();  // radians, axis-angle

  static Twist Zero() { return Twist{}; }

  static Twist FromVector(const Eigen::Matrix<double, 6, 1>& v) {
    return Twist{v.head<3>(), v.tail<3>()};
  }

  Eigen::Matrix<double, 6, 1> vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << rho, phi;
    return v;
  }

  double norm() const { return vector().norm(); }

  bool allFinite() const { return rho.allFinite() && phi.allFinite(); }
};

/// Rigid transform acting on camera-frame points: X' = R*X + t.
struct PoseSE3 {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static PoseSE3 Identity() { return PoseSE3{}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const {
    return rotation * x + translation;
  }

  PoseSE3 inverse() const {
    PoseSE3 out;
    out.rotation = rotation.transpose();
    out.translation = -(out.rotation * translation);
    return out;
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  /// Projects the rotation back onto SO(3) via quaternion normalization.
  /// Used after long composition chains to keep determinant drift below
  /// tolerance.
  PoseSE3 orthonormalized() const {
    Eigen::Quaterniond q(rotation);
    q.normalize();
    return PoseSE3{q.toRotationMatrix(), translation};
  }
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

namespace detail {

constexpr double kSmallAngle = 1e-8;
constexpr double kPiMargin = 1e-6;

}  // namespace detail

/// SE(3) exponential: Rodrigues rotation plus the V-matrix coupling of
/// translation to rotation. Small angles fall back to the second-order
/// series so the map stays smooth across the branch.
inline PoseSE3 exp(const Twist& xi) {
  if (!xi.allFinite()) {
    throw InvalidArgumentError("exp: non-finite twist");
  }
  const double theta = xi.phi.norm();
  PoseSE3 out;
  if (theta < detail::kSmallAngle) {
    const Eigen::Matrix3d w = skew(xi.phi);
    const Eigen::Matrix3d w2 = w * w;
    out.rotation = Eigen::Matrix3d::Identity() + w + 0.5 * w2;
    const Eigen::Matrix3d v =
        Eigen::Matrix3d::Identity() + 0.5 * w + (1.0 / 6.0) * w2;
    out.translation = v * xi.rho;
    return out;
  }
  const Eigen::Vector3d axis = xi.phi / theta;
  const Eigen::Matrix3d a = skew(axis);
  const Eigen::Matrix3d a2 = a * a;
  const double s = std::sin(theta);
  const double half_sin = std::sin(0.5 * theta);
  const double one_minus_cos = 2.0 * half_sin * half_sin;
  out.rotation = Eigen::Matrix3d::Identity() + s * a + one_minus_cos * a2;
  const Eigen::Matrix3d v = Eigen::Matrix3d::Identity() +
                            (one_minus_cos / theta) * a +
                            (1.0 - s / theta) * a2;
  out.translation = v * xi.rho;
  return out;
}

/// SE(3) logarithm on the principal branch. Rotation extraction goes
/// through a quaternion, which stays accurate up to the branch cut.
inline Twist log(const PoseSE3& pose) {
  Eigen::Quaterniond q(pose.rotation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double vec_norm = q.vec().norm();
  const double theta = 2.0 * std::atan2(vec_norm, q.w());
  if (theta >= M_PI - detail::kPiMargin) {
    throw DegenerateRotationError("log: rotation angle within 1e-6 of pi");
  }
  Twist out;
  if (theta < detail::kSmallAngle || vec_norm < 1e-300) {
    out.phi = 2.0 * q.vec();
    const Eigen::Matrix3d w = skew(out.phi);
    out.rho = (Eigen::Matrix3d::Identity() - 0.5 * w +
               (1.0 / 12.0) * (w * w)) *
              pose.translation;
    return out;
  }
  const Eigen::Vector3d axis = q.vec() / vec_norm;
  out.phi = theta * axis;
  const Eigen::Matrix3d a = skew(axis);
  const Eigen::Matrix3d a2 = a * a;
  // V^{-1} = I - (theta/2) [a]x + (1 - (theta/2) cot(theta/2)) [a]x^2
  const double half = 0.5 * theta;
  const double coeff = 1.0 - half * std::cos(half) / std::sin(half);
  const Eigen::Matrix3d v_inv =
      Eigen::Matrix3d::Identity() - half * a + coeff * a2;
  out.rho = v_inv * pose.translation;
  return out;
}

inline PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  PoseSE3 out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

/// Left-multiplied increment in the world/camera frame:
/// returns log(exp(inc) * exp(xi)).
inline Twist left_update(const Twist& inc, const Twist& xi) {
  if (!inc.allFinite() || !xi.allFinite()) {
    throw InvalidArgumentError("left_update: non-finite twist");
  }
  return log(compose(exp(inc), exp(xi)));
}

/// Geodesic rotation angle of R, in radians.
inline double rotation_angle(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

/// Geodesic angle between two rotations, in radians.
inline double rotation_distance(const Eigen::Matrix3d& a,
                                const Eigen::Matrix3d& b) {
  return rotation_angle(a.transpose() * b);
}

}  // namespace poseref
