#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace poseref::rng {

/// splitmix64 step; the usual seed-expansion workhorse.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable seed derivation: folds each component through splitmix64 so
/// that (master, i, j, k) tuples map to well-spread, reproducible
/// sub-stream seeds.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x243f6a8885a308d3ULL;  // arbitrary nonzero start
  for (std::uint64_t p : parts) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    state = splitmix64(state);
  }
  return state;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline Eigen::Vector3d gaussian_vec3(std::mt19937_64& eng, double stddev_x,
                                     double stddev_y, double stddev_z) {
  std::normal_distribution<double> unit(0.0, 1.0);
  return {stddev_x * unit(eng), stddev_y * unit(eng), stddev_z * unit(eng)};
}

inline Eigen::Vector2d gaussian_vec2(std::mt19937_64& eng, double stddev) {
  std::normal_distribution<double> unit(0.0, 1.0);
  return {stddev * unit(eng), stddev * unit(eng)};
}

/// Uniform sample inside a disk of the given radius (mean |sample| = 2R/3).
inline Eigen::Vector2d uniform_disk(std::mt19937_64& eng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(eng));
  const double a = 2.0 * M_PI * unit(eng);
  return {r * std::cos(a), r * std::sin(a)};
}

/// Haar-uniform random rotation via a normalized Gaussian quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& eng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::Vector4d q;
  do {
    q = {unit(eng), unit(eng), unit(eng), unit(eng)};
  } while (q.norm() < 1e-12);
  q.normalize();
  return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
}

inline Eigen::VectorXd random_unit_vector(std::mt19937_64& eng, int dim) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v(i) = unit(eng);
  } while (v.norm() < 1e-12);
  v.normalize();
  return v;
}

}  // namespace poseref::rng
