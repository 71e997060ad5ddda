#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <vector>

#include "poseref/errors.hpp"
#include "poseref/model.hpp"
#include "poseref/se3.hpp"

namespace poseref {

/// ADD: mean Euclidean distance between model points transformed with the
/// estimated pose and with the ground-truth pose.
inline double add_metric(const PoseSE3& pose_hat, const PoseSE3& pose_gt,
                         const ObjectModel& model) {
  double sum = 0.0;
  for (const auto& v : model.vertices) {
    sum += (pose_hat.apply(v) - pose_gt.apply(v)).norm();
  }
  return sum / static_cast<double>(model.vertices.size());
}

/// ADD-S: closest-point variant for symmetric objects. Brute-force O(M^2);
/// models are small at desk scale.
inline double adds_metric(const PoseSE3& pose_hat, const PoseSE3& pose_gt,
                          const ObjectModel& model) {
  std::vector<Eigen::Vector3d> hat, gt;
  hat.reserve(model.vertices.size());
  gt.reserve(model.vertices.size());
  for (const auto& v : model.vertices) {
    hat.push_back(pose_hat.apply(v));
    gt.push_back(pose_gt.apply(v));
  }
  double sum = 0.0;
  for (const auto& h : hat) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : gt) {
      best = std::min(best, (h - g).norm());
    }
    sum += best;
  }
  return sum / static_cast<double>(model.vertices.size());
}

/// ADD or ADD-S depending on the model's symmetric flag.
inline double pose_distance(const PoseSE3& pose_hat, const PoseSE3& pose_gt,
                            const ObjectModel& model) {
  return model.symmetric ? adds_metric(pose_hat, pose_gt, model)
                         : add_metric(pose_hat, pose_gt, model);
}

/// Fraction of values strictly below fraction * diameter, as a percentage.
inline double threshold_accuracy(const std::vector<double>& values,
                                 double diameter, double fraction) {
  if (values.empty()) {
    throw EmptyInputError("threshold_accuracy: no values");
  }
  if (!(diameter > 0.0) || !(fraction > 0.0)) {
    throw InvalidArgumentError("threshold_accuracy: bad threshold parameters");
  }
  const double threshold = fraction * diameter;
  int pass = 0;
  for (double v : values) pass += (v < threshold);
  return 100.0 * static_cast<double>(pass) / static_cast<double>(values.size());
}

/// AUC of the accuracy-threshold curve over tau = 0.001k m, k = 1..100
/// (0 to 10 cm in 0.1 cm steps), equally weighted, strict inequality.
inline double auc_add(const std::vector<double>& values) {
  if (values.empty()) {
    throw EmptyInputError("auc_add: no values");
  }
  double total = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double tau = 0.001 * static_cast<double>(k);
    int pass = 0;
    for (double v : values) pass += (v < tau);
    total += 100.0 * static_cast<double>(pass) /
             static_cast<double>(values.size());
  }
  return total / 100.0;
}

inline double rotation_error_deg(const PoseSE3& pose_hat,
                                 const PoseSE3& pose_gt) {
  return rotation_distance(pose_hat.rotation, pose_gt.rotation) * 180.0 / M_PI;
}

inline double translation_error_m(const PoseSE3& pose_hat,
                                  const PoseSE3& pose_gt) {
  return (pose_hat.translation - pose_gt.translation).norm();
}

/// Aggregate over a batch of ADD(-S) values at the standard thresholds.
struct EvalReport {
  std::vector<double> values;  // meters, one per trial
  double diameter = 0.0;
  double accuracy_002d = 0.0;
  double accuracy_005d = 0.0;
  double accuracy_01d = 0.0;
  double auc = 0.0;
};

inline EvalReport make_eval_report(std::vector<double> values,
                                   double diameter) {
  EvalReport report;
  report.values = std::move(values);
  report.diameter = diameter;
  report.accuracy_002d = threshold_accuracy(report.values, diameter, 0.02);
  report.accuracy_005d = threshold_accuracy(report.values, diameter, 0.05);
  report.accuracy_01d = threshold_accuracy(report.values, diameter, 0.10);
  report.auc = auc_add(report.values);
  return report;
}

}  // namespace poseref
