#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "poseref/correspondence.hpp"
#include "poseref/lm.hpp"
#include "poseref/scene.hpp"
#include "poseref/se3.hpp"

namespace poseref {

enum class ProviderMode { oracle, drift };

inline const char* to_string(ProviderMode m) {
  return m == ProviderMode::oracle ? "oracle" : "drift";
}

struct RefinementConfig {
  int recurrent_iterations = 4;
  int rendering_cycles = 3;
  LMSettings lm;
  CorruptionSpec corruption;
  DescriptorSpec descriptors;
  bool use_weighting = true;
  bool use_rectification = true;
  ProviderMode provider_mode = ProviderMode::oracle;
  double drift_window = 8.0;  // pixels

  void validate() const {
    if (recurrent_iterations < 1 || rendering_cycles < 1) {
      throw InvalidArgumentError(
          "refinement: iterations and cycles must be >= 1");
    }
    lm.validate();
    corruption.validate();
    descriptors.validate();
    if (!(drift_window > 0.0)) {
      throw InvalidArgumentError("refinement: drift window must be > 0");
    }
  }
};

inline std::unique_ptr<CorrespondenceProvider> make_provider(
    const RefinementConfig& config) {
  if (config.provider_mode == ProviderMode::drift) {
    return std::make_unique<DriftProvider>(config.corruption,
                                           config.drift_window);
  }
  return std::make_unique<OracleProvider>(config.corruption);
}

struct IterationRecord {
  int cycle = 0;
  int iteration = 0;          // within the cycle, 1-based
  PoseSE3 delta_pose;         // residual pose after this iteration's solve
  double objective = 0.0;     // final weighted objective of the solve
  double mean_field_error = 0.0;  // estimated field vs ground truth, pixels
  int lm_iterations = 0;
};

struct RefinementTrace {
  std::vector<IterationRecord> iterations;
  std::vector<PoseSE3> cycle_poses;  // updated object pose after each cycle
};

struct RefineResult {
  PoseSE3 pose;
  RefinementTrace trace;
  bool success = true;
  std::string failure;
  int lm_iterations_total = 0;
};

/// Cycle-boundary pose update: P <- deltaP * P, re-orthonormalized to keep
/// rotation drift in check over long chains.
inline PoseSE3 apply_cycle_update(const PoseSE3& delta, const PoseSE3& pose) {
  return compose(delta, pose).orthonormalized();
}

/// Mean distance between matching valid entries of two fields (pixels).
inline double mean_field_error(const CorrespondenceField& est,
                               const CorrespondenceField& gt) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < est.size() && i < gt.size(); ++i) {
    if (!est.valid[i] || !gt.valid[i]) continue;
    sum += (est.targets[i] - gt.targets[i]).norm();
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

/// The recurrent rectification loop: per rendering cycle, render the
/// reference view at the current pose, then alternate correspondence
/// estimation, weighted LM pose solve, and field rectification for N
/// iterations; fold the residual pose into the object pose and re-render.
/// A trial whose estimate drives the model off-frame (or degenerate) is
/// reported as a failure, not an exception.
inline RefineResult refine(const Scene& scene,
                           const CorrespondenceProvider& provider,
                           const RefinementConfig& config) {
  config.validate();
  RefineResult result;
  result.pose = scene.init_pose;

  try {
    for (int cycle = 0; cycle < config.rendering_cycles; ++cycle) {
      const RenderedView view =
          render_view(scene.model, result.pose, scene.intrinsics);
      const PoseSE3 delta_gt = compose(scene.gt_pose, result.pose.inverse());
      const CorrespondenceField gt_field =
          ground_truth_field(view, delta_gt, scene.intrinsics);

      // Zero-flow bootstrap: each cycle starts from the identity residual
      // pose, since the cycle update absorbed the previous residual.
      CorrespondenceField prior = identity_field(view);
      PoseSE3 delta_hat = PoseSE3::Identity();
      Twist xi_prev = Twist::Zero();

      for (int t = 1; t <= config.recurrent_iterations; ++t) {
        const std::uint64_t iter_seed = rng::derive_seed(
            {scene.seed, 0xe57u, static_cast<std::uint64_t>(cycle),
             static_cast<std::uint64_t>(t)});
        const ProviderResult est =
            provider.estimate(view, gt_field, prior, iter_seed);

        std::vector<double> weights;
        if (config.use_weighting) {
          const DescriptorBank bank = synth_descriptors(
              est.field, est.outlier_mask, config.descriptors,
              rng::derive_seed({iter_seed, 0xdecu}));
          weights = similarity_weights(bank);
        } else {
          weights.assign(est.field.size(), 1.0);
        }

        const PoseProblem problem = make_problem(
            view, est.field, std::move(weights), scene.intrinsics, xi_prev);
        const SolveReport solve = lm_solve(problem, config.lm);
        delta_hat = solve.delta_pose;
        xi_prev = solve.xi;
        result.lm_iterations_total += solve.iterations;

        const CorrespondenceField rectified =
            rectify(est.field, view, delta_hat, scene.intrinsics);
        prior = config.use_rectification ? rectified : est.field;

        IterationRecord rec;
        rec.cycle = cycle;
        rec.iteration = t;
        rec.delta_pose = delta_hat;
        rec.objective = solve.objectives.empty() ? 0.0 : solve.objectives.back();
        rec.mean_field_error = mean_field_error(est.field, gt_field);
        rec.lm_iterations = solve.iterations;
        result.trace.iterations.push_back(rec);
      }

      result.pose = apply_cycle_update(delta_hat, result.pose);
      result.trace.cycle_poses.push_back(result.pose);
    }
  } catch (const EmptyViewError& e) {
    result.success = false;
    result.failure = e.what();
  } catch (const BehindCameraError& e) {
    result.success = false;
    result.failure = e.what();
  } catch (const UnderdeterminedProblemError& e) {
    result.success = false;
    result.failure = e.what();
  } catch (const DegenerateRotationError& e) {
    result.success = false;
    result.failure = e.what();
  }
  return result;
}

/// Mean per-vertex L1 distance between the two transformed vertex sets
/// (meters); a pose-alignment diagnostic.
inline double model_alignment_error(const PoseSE3& pose_a,
                                    const PoseSE3& pose_b,
                                    const ObjectModel& model) {
  double sum = 0.0;
  for (const auto& v : model.vertices) {
    sum += (pose_a.apply(v) - pose_b.apply(v)).lpNorm<1>();
  }
  return model.vertices.empty() ? 0.0
                                : sum / static_cast<double>(model.vertices.size());
}

}  // namespace poseref
