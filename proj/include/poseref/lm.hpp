#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "poseref/camera.hpp"
#include "poseref/correspondence.hpp"
#include "poseref/errors.hpp"
#include "poseref/scene.hpp"
#include "poseref/se3.hpp"

namespace poseref {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Weighted reprojection problem over a residual pose: reference points
/// with depths, a target correspondence field, per-point weights, and the
/// initial twist. Invalid field entries carry zero weight and contribute
/// zero residual.
struct PoseProblem {
  std::vector<Eigen::Vector2d> ref_pixels;
  std::vector<double> ref_depths;
  std::vector<Eigen::Vector3d> ref_points;  // unprojected, cached
  CorrespondenceField target;
  std::vector<double> weights;
  CameraIntrinsics intrinsics;
  Twist xi0;

  std::size_t size() const { return ref_pixels.size(); }
};

inline PoseProblem make_problem(const RenderedView& view,
                                const CorrespondenceField& target,
                                std::vector<double> weights,
                                const CameraIntrinsics& k,
                                const Twist& xi0 = Twist::Zero()) {
  if (target.size() != view.points.size() ||
      weights.size() != view.points.size()) {
    throw InvalidArgumentError("pose problem: entry counts disagree");
  }
  PoseProblem p;
  p.ref_pixels.reserve(view.points.size());
  p.ref_depths.reserve(view.points.size());
  p.ref_points.reserve(view.points.size());
  for (const auto& vp : view.points) {
    p.ref_pixels.push_back(vp.pixel);
    p.ref_depths.push_back(vp.depth);
    p.ref_points.push_back(unproject(vp.pixel, vp.depth, k));
  }
  p.target = target;
  p.weights = std::move(weights);
  p.intrinsics = k;
  p.xi0 = xi0;
  int usable = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.target.valid[i]) p.weights[i] = 0.0;
    if (p.weights[i] < 0.0) {
      throw InvalidArgumentError("pose problem: negative weight");
    }
    usable += (p.target.valid[i] && p.weights[i] > 0.0);
  }
  if (usable < 3) {
    throw UnderdeterminedProblemError(
        "pose problem: fewer than 3 valid weighted correspondences");
  }
  return p;
}

/// Stacked residual vector r, length 2M, r_i = target_i - C(x_i; xi).
/// Invalid entries contribute zero.
inline Eigen::VectorXd residuals(const PoseProblem& p, const Twist& xi) {
  const PoseSE3 pose = exp(xi);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * static_cast<int>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.target.valid[i]) continue;
    const Eigen::Vector3d x = pose.apply(p.ref_points[i]);
    if (!(x.z() > kMinDepth)) {
      throw BehindCameraError("residuals: transformed point behind camera");
    }
    r.segment<2>(2 * static_cast<int>(i)) =
        p.target.targets[i] - project(x, p.intrinsics);
  }
  return r;
}

/// J = -dr/dxi with respect to a left-multiplied increment: row block i is
/// dproject/dX * [ I | -[X]x ] at X = exp(xi) * x_i. Columns ordered
/// (rho; phi).
inline Eigen::MatrixXd jacobian(const PoseProblem& p, const Twist& xi) {
  const PoseSE3 pose = exp(xi);
  Eigen::MatrixXd j =
      Eigen::MatrixXd::Zero(2 * static_cast<int>(p.size()), 6);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.target.valid[i]) continue;
    const Eigen::Vector3d x = pose.apply(p.ref_points[i]);
    if (!(x.z() > kMinDepth)) {
      throw BehindCameraError("jacobian: transformed point behind camera");
    }
    const Eigen::Matrix<double, 2, 3> jp = project_jacobian(x, p.intrinsics);
    j.block<2, 3>(2 * static_cast<int>(i), 0) = jp;
    j.block<2, 3>(2 * static_cast<int>(i), 3) = -jp * skew(x);
  }
  return j;
}

/// Weighted objective E(xi) = sum_i w_i |r_i|^2 (pixels^2).
inline double objective(const PoseProblem& p, const Twist& xi) {
  const Eigen::VectorXd r = residuals(p, xi);
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    e += p.weights[i] * r.segment<2>(2 * static_cast<int>(i)).squaredNorm();
  }
  return e;
}

struct LMSettings {
  double lambda0 = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  int max_iterations = 20;
  double cost_tolerance = 1e-12;  // absolute decrease of E
  double step_tolerance = 1e-10;  // twist-increment norm
  double lambda_max = 1e12;
  bool marquardt_scaling = false;  // damp by diag(JtWJ) instead of I

  void validate() const {
    if (!(lambda0 > 0.0) || !(lambda_up > 1.0) ||
        !(lambda_down > 0.0 && lambda_down < 1.0)) {
      throw InvalidArgumentError("lm settings: bad damping schedule");
    }
    if (max_iterations < 1) {
      throw InvalidArgumentError("lm settings: max_iterations must be >= 1");
    }
  }
};

enum class Termination {
  converged_cost,
  converged_step,
  max_iterations,
  stalled,
  infeasible_start,
};

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged_cost: return "converged_cost";
    case Termination::converged_step: return "converged_step";
    case Termination::max_iterations: return "max_iterations";
    case Termination::stalled: return "stalled";
    case Termination::infeasible_start: return "infeasible_start";
  }
  return "unknown";
}

struct SolveReport {
  Twist xi;
  PoseSE3 delta_pose;
  std::vector<double> objectives;  // initial value, then one per iteration
  Termination reason = Termination::max_iterations;
  int accepted_steps = 0;
  int rejected_steps = 0;
  int iterations = 0;
};

/// Damped least squares on the residual pose: at each iteration solves
/// (JtWJ + lambda I) dxi = JtW r and applies the increment on the left.
/// Steps are accepted only on strict objective decrease; behind-camera
/// evaluations count as infinite objective and are rejected like any
/// uphill step.
inline SolveReport lm_solve(const PoseProblem& p, const LMSettings& s) {
  s.validate();
  SolveReport report;
  report.xi = p.xi0;

  double current = 0.0;
  try {
    current = objective(p, report.xi);
  } catch (const BehindCameraError&) {
    report.delta_pose = exp(report.xi);
    report.reason = Termination::infeasible_start;
    return report;
  }
  report.objectives.push_back(current);

  double lambda = s.lambda0;
  Eigen::MatrixXd j;
  Eigen::VectorXd r;
  bool refresh = true;
  report.reason = Termination::max_iterations;

  for (int it = 0; it < s.max_iterations; ++it) {
    report.iterations = it + 1;
    if (refresh) {
      j = jacobian(p, report.xi);
      r = residuals(p, report.xi);
      refresh = false;
    }

    Matrix6d h = Matrix6d::Zero();
    Vector6d g = Vector6d::Zero();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double w = p.weights[i];
      if (w == 0.0) continue;
      const auto jb = j.block<2, 6>(2 * static_cast<int>(i), 0);
      const auto rb = r.segment<2>(2 * static_cast<int>(i));
      h.noalias() += w * jb.transpose() * jb;
      g.noalias() += w * jb.transpose() * rb;
    }
    Matrix6d damped = h;
    if (s.marquardt_scaling) {
      damped += lambda * h.diagonal().asDiagonal().toDenseMatrix();
    } else {
      damped += lambda * Matrix6d::Identity();
    }

    const Vector6d step = damped.ldlt().solve(g);
    if (!step.allFinite()) {
      lambda *= s.lambda_up;
      ++report.rejected_steps;
      report.objectives.push_back(current);
      if (lambda > s.lambda_max) {
        report.reason = Termination::stalled;
        break;
      }
      continue;
    }
    if (step.norm() < s.step_tolerance) {
      report.reason = Termination::converged_step;
      break;
    }

    double candidate_cost = std::numeric_limits<double>::infinity();
    Twist candidate;
    bool candidate_ok = false;
    try {
      candidate = left_update(Twist::FromVector(step), report.xi);
      candidate_cost = objective(p, candidate);
      candidate_ok = true;
    } catch (const BehindCameraError&) {
    } catch (const DegenerateRotationError&) {
    }

    if (candidate_ok && candidate_cost < current) {
      const double decrease = current - candidate_cost;
      report.xi = candidate;
      current = candidate_cost;
      refresh = true;
      lambda *= s.lambda_down;
      ++report.accepted_steps;
      report.objectives.push_back(current);
      if (decrease < s.cost_tolerance) {
        report.reason = Termination::converged_cost;
        break;
      }
    } else {
      lambda *= s.lambda_up;
      ++report.rejected_steps;
      report.objectives.push_back(current);
      if (lambda > s.lambda_max) {
        report.reason = Termination::stalled;
        break;
      }
    }
  }

  report.delta_pose = exp(report.xi);
  return report;
}

}  // namespace poseref
