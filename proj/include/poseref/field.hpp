#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace poseref {

/// Dense per-reference-point correspondence estimate: for reference entry
/// i, the matching 2D location in the target view. Index order always
/// follows the source RenderedView.
struct CorrespondenceField {
  std::vector<Eigen::Vector2d> targets;
  std::vector<std::uint8_t> valid;

  std::size_t size() const { return targets.size(); }

  int valid_count() const {
    int n = 0;
    for (auto v : valid) n += (v != 0);
    return n;
  }
};

}  // namespace poseref
