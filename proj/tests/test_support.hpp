#pragma once

// Shared test utilities. Oracles here are deliberately independent of the
// library implementation paths they check.

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "poseref/se3.hpp"

namespace testsupport {

/// 4x4 twist matrix [[skew(phi), rho], [0, 0]].
inline Eigen::Matrix4d twist_matrix(const poseref::Twist& xi) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 1) = -xi.phi.z();
  m(0, 2) = xi.phi.y();
  m(1, 0) = xi.phi.z();
  m(1, 2) = -xi.phi.x();
  m(2, 0) = -xi.phi.y();
  m(2, 1) = xi.phi.x();
  m.block<3, 1>(0, 3) = xi.rho;
  return m;
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
inline Eigen::Matrix4d expm(Eigen::Matrix4d a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scaled = norm;
  while (scaled > 0.25) {
    scaled *= 0.5;
    ++squarings;
  }
  a /= std::pow(2.0, squarings);
  Eigen::Matrix4d result = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= 40; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

inline poseref::Twist random_twist(std::mt19937_64& eng, double max_angle,
                                   double trans_scale = 1.0) {
  std::uniform_real_distribution<double> angle(0.0, max_angle);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d axis;
  do {
    axis = {gauss(eng), gauss(eng), gauss(eng)};
  } while (axis.norm() < 1e-9);
  axis.normalize();
  poseref::Twist xi;
  xi.phi = angle(eng) * axis;
  xi.rho = trans_scale * Eigen::Vector3d(gauss(eng), gauss(eng), gauss(eng));
  return xi;
}

inline poseref::PoseSE3 random_pose(std::mt19937_64& eng, double max_angle,
                                    double trans_scale = 1.0) {
  return poseref::exp(random_twist(eng, max_angle, trans_scale));
}

inline double pose_difference(const poseref::PoseSE3& a,
                              const poseref::PoseSE3& b) {
  return (a.rotation - b.rotation).norm() +
         (a.translation - b.translation).norm();
}

}  // namespace testsupport
