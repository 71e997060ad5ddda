#pragma once

#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "poseref/errors.hpp"

namespace poseref {

/// Point model of a rigid object in its canonical frame. The diameter is
/// always the exact brute-force maximum pairwise vertex distance.
struct ObjectModel {
  std::vector<Eigen::Vector3d> vertices;
  double diameter = 0.0;
  bool symmetric = false;
};

inline double max_pairwise_distance(
    const std::vector<Eigen::Vector3d>& vertices) {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      best = std::max(best, (vertices[i] - vertices[j]).norm());
    }
  }
  return best;
}

namespace detail {

/// True when no 4 vertices span a non-degenerate tetrahedron.
inline bool all_coplanar(const std::vector<Eigen::Vector3d>& v) {
  if (v.size() < 4) return true;
  std::size_t b = 1;
  while (b < v.size() && (v[b] - v[0]).norm() < 1e-12) ++b;
  if (b == v.size()) return true;
  const Eigen::Vector3d e1 = v[b] - v[0];
  std::size_t c = b + 1;
  while (c < v.size() && e1.cross(v[c] - v[0]).norm() < 1e-12) ++c;
  if (c == v.size()) return true;
  const Eigen::Vector3d n = e1.cross(v[c] - v[0]).normalized();
  for (std::size_t d = c + 1; d < v.size(); ++d) {
    if (std::abs(n.dot(v[d] - v[0])) > 1e-12) return false;
  }
  return true;
}

}  // namespace detail

inline ObjectModel make_model(std::vector<Eigen::Vector3d> vertices,
                              bool symmetric = false) {
  if (vertices.size() < 4) {
    throw InvalidArgumentError("model: fewer than 4 vertices");
  }
  if (detail::all_coplanar(vertices)) {
    throw InvalidArgumentError("model: vertices are coplanar");
  }
  ObjectModel m;
  m.vertices = std::move(vertices);
  m.diameter = max_pairwise_distance(m.vertices);
  m.symmetric = symmetric;
  return m;
}

/// Parses the plain-text model format: one "x y z" triple per line
/// (meters), '#' starts a comment, blank lines ignored.
inline ObjectModel load_model(const std::string& path, bool symmetric = false) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("model file not readable: " + path);
  }
  std::vector<Eigen::Vector3d> vertices;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x)) {
      std::string token;
      std::istringstream probe(line);
      if (probe >> token) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": expected numeric vertex line");
      }
      continue;  // blank or comment-only line
    }
    if (!(ss >> y >> z)) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected three coordinates");
    }
    std::string trailing;
    if (ss >> trailing) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": unexpected trailing token '" + trailing + "'");
    }
    vertices.emplace_back(x, y, z);
  }
  if (vertices.empty()) {
    throw ParseError(path + ": no vertices found");
  }
  try {
    return make_model(std::move(vertices), symmetric);
  } catch (const InvalidArgumentError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void save_model(const ObjectModel& model, const std::string& path,
                       const std::string& comment = "") {
  std::ofstream out(path);
  if (!out) {
    throw Error("model file not writable: " + path);
  }
  if (!comment.empty()) out << "# " << comment << "\n";
  out.precision(17);
  for (const auto& v : model.vertices) {
    out << v.x() << " " << v.y() << " " << v.z() << "\n";
  }
}

/// Regular tetrahedron centered at the origin; diameter = edge length.
inline ObjectModel make_tetrahedron(double diameter = 0.2) {
  const double s = diameter / (2.0 * std::sqrt(2.0));
  std::vector<Eigen::Vector3d> v = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  return make_model(std::move(v));
}

/// n x n x n cube grid scaled so the space diagonal equals the diameter.
inline ObjectModel make_box_grid(int n, double diameter = 0.2) {
  if (n < 2) {
    throw InvalidArgumentError("box grid: n must be at least 2");
  }
  const double edge = diameter / std::sqrt(3.0);
  std::vector<Eigen::Vector3d> v;
  v.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        v.emplace_back(edge * (static_cast<double>(i) / (n - 1) - 0.5),
                       edge * (static_cast<double>(j) / (n - 1) - 0.5),
                       edge * (static_cast<double>(k) / (n - 1) - 0.5));
      }
    }
  }
  return make_model(std::move(v));
}

/// Fibonacci-spiral samples on a sphere of the given diameter.
inline ObjectModel make_sphere(int n, double diameter = 0.2,
                               bool symmetric = false) {
  if (n < 4) {
    throw InvalidArgumentError("sphere: n must be at least 4");
  }
  const double radius = 0.5 * diameter;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Eigen::Vector3d> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double y = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double a = golden * i;
    v.emplace_back(radius * r * std::cos(a), radius * y,
                   radius * r * std::sin(a));
  }
  return make_model(std::move(v), symmetric);
}

}  // namespace poseref
