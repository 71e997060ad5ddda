#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "poseref/errors.hpp"
#include "poseref/field.hpp"
#include "poseref/rng.hpp"
#include "poseref/scene.hpp"

namespace poseref {

/// Synthetic degradation applied to a ground-truth correspondence field:
/// isotropic Gaussian pixel noise on every entry, plus a Bernoulli subset
/// of gross mismatches drawn uniformly from a disk around the true target.
struct CorruptionSpec {
  double noise_std = 0.0;         // pixels
  double outlier_fraction = 0.0;  // in [0, 1]
  double outlier_radius = 50.0;   // pixels

  void validate() const {
    if (noise_std < 0.0) {
      throw InvalidArgumentError("corruption: noise_std must be >= 0");
    }
    if (outlier_fraction < 0.0 || outlier_fraction > 1.0) {
      throw InvalidArgumentError("corruption: outlier_fraction must be in [0,1]");
    }
    if (!(outlier_radius > 0.0)) {
      throw InvalidArgumentError("corruption: outlier_radius must be > 0");
    }
  }
};

/// Provider output. The outlier mask records which entries were corrupted
/// grossly (or estimated blind); it feeds descriptor synthesis only and is
/// never visible to the pose optimizer.
struct ProviderResult {
  CorrespondenceField field;
  std::vector<std::uint8_t> outlier_mask;
};

inline ProviderResult corrupt_field(const CorrespondenceField& gt,
                                    const CorruptionSpec& spec,
                                    std::uint64_t seed) {
  spec.validate();
  auto eng = rng::make_engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ProviderResult out;
  out.field.targets.resize(gt.size());
  out.field.valid = gt.valid;
  out.outlier_mask.assign(gt.size(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.valid[i]) {
      out.field.targets[i] = gt.targets[i];
      continue;
    }
    if (unit(eng) < spec.outlier_fraction) {
      out.outlier_mask[i] = 1;
      out.field.targets[i] =
          gt.targets[i] + rng::uniform_disk(eng, spec.outlier_radius);
    } else {
      out.field.targets[i] =
          gt.targets[i] + rng::gaussian_vec2(eng, spec.noise_std);
    }
  }
  return out;
}

/// Synthetic stand-in for learned 2D-3D descriptors. Inlier pairs are
/// near-identical unit vectors, outlier pairs independent random unit
/// vectors, preserving the inlier-similar / outlier-dissimilar contract
/// the similarity score consumes.
struct DescriptorSpec {
  int dim = 16;
  double inlier_perturb = 0.05;  // max |1 - d_M . d_I| for inliers
  double sigma = 1.0;            // similarity sharpness

  void validate() const {
    if (dim < 2) {
      throw InvalidArgumentError("descriptors: dim must be >= 2");
    }
    if (inlier_perturb < 0.0 || inlier_perturb >= 0.5) {
      throw InvalidArgumentError(
          "descriptors: inlier_perturb must be in [0, 0.5)");
    }
    if (!(sigma > 0.0)) {
      throw InvalidArgumentError("descriptors: sigma must be > 0");
    }
  }
};

struct DescriptorBank {
  std::vector<Eigen::VectorXd> model_desc;
  std::vector<Eigen::VectorXd> target_desc;
  double sigma = 1.0;
};

inline DescriptorBank synth_descriptors(const CorrespondenceField& field,
                                        const std::vector<std::uint8_t>& outlier_mask,
                                        const DescriptorSpec& spec,
                                        std::uint64_t seed) {
  spec.validate();
  if (outlier_mask.size() != field.size()) {
    throw InvalidArgumentError("synth_descriptors: mask/field size mismatch");
  }
  auto eng = rng::make_engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DescriptorBank bank;
  bank.sigma = spec.sigma;
  bank.model_desc.reserve(field.size());
  bank.target_desc.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    Eigen::VectorXd d_model = rng::random_unit_vector(eng, spec.dim);
    Eigen::VectorXd d_target;
    if (outlier_mask[i]) {
      d_target = rng::random_unit_vector(eng, spec.dim);
    } else if (spec.inlier_perturb == 0.0) {
      d_target = d_model;
    } else {
      // Rotate d_model by an angle with cos(a) = 1 - g, g ~ U[0, perturb],
      // inside the plane spanned with a random orthogonal direction.
      const double gap = spec.inlier_perturb * unit(eng);
      const double cos_a = 1.0 - gap;
      const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
      Eigen::VectorXd ortho;
      do {
        ortho = rng::random_unit_vector(eng, spec.dim);
        ortho -= ortho.dot(d_model) * d_model;
      } while (ortho.norm() < 1e-9);
      ortho.normalize();
      d_target = cos_a * d_model + sin_a * ortho;
      d_target.normalize();
    }
    bank.model_desc.push_back(std::move(d_model));
    bank.target_desc.push_back(std::move(d_target));
  }
  return bank;
}

/// Similarity score per correspondence pair:
/// w = exp(-|1 - d_M . d_I| / sigma), in (0, 1].
inline std::vector<double> similarity_weights(const DescriptorBank& bank) {
  std::vector<double> w;
  w.reserve(bank.model_desc.size());
  for (std::size_t i = 0; i < bank.model_desc.size(); ++i) {
    const double dot = bank.model_desc[i].dot(bank.target_desc[i]);
    w.push_back(std::exp(-std::abs(1.0 - dot) / bank.sigma));
  }
  return w;
}

/// Rectification: regenerates the whole field from the currently optimized
/// residual pose, enforcing rigid-transformation consistency. The estimated
/// values are replaced wholesale and validity flags are recomputed from the
/// image bounds.
inline CorrespondenceField rectify(const CorrespondenceField& field,
                                   const RenderedView& view,
                                   const PoseSE3& delta_pose,
                                   const CameraIntrinsics& k) {
  if (field.size() != view.points.size()) {
    throw InvalidArgumentError("rectify: field/view size mismatch");
  }
  return field_from_pose(view, delta_pose, k);
}

/// Source of correspondence estimates; stands in for the learned stage.
/// `gt` is the exact field for the current view, `prior` what the previous
/// iteration handed over (rectified or raw).
class CorrespondenceProvider {
 public:
  virtual ~CorrespondenceProvider() = default;
  virtual ProviderResult estimate(const RenderedView& view,
                                  const CorrespondenceField& gt,
                                  const CorrespondenceField& prior,
                                  std::uint64_t seed) const = 0;
};

/// Re-corrupts around the ground truth each call, ignoring the prior.
/// Isolates solver behavior from estimation dynamics.
class OracleProvider final : public CorrespondenceProvider {
 public:
  explicit OracleProvider(const CorruptionSpec& corruption)
      : corruption_(corruption) {
    corruption_.validate();
  }

  ProviderResult estimate(const RenderedView&, const CorrespondenceField& gt,
                          const CorrespondenceField&,
                          std::uint64_t seed) const override {
    return corrupt_field(gt, corruption_, seed);
  }

 private:
  CorruptionSpec corruption_;
};

/// Window-limited lookup: the true target is found (then corrupted as
/// usual) only when it lies within `window` pixels of the prior estimate;
/// otherwise the provider can only perturb around the prior and flags the
/// entry in the outlier mask, which surfaces as a dissimilar descriptor
/// pair downstream. Makes rectification consequential: rectified priors
/// shift the windows toward the truth.
class DriftProvider final : public CorrespondenceProvider {
 public:
  DriftProvider(const CorruptionSpec& corruption, double window_px)
      : corruption_(corruption), window_(window_px) {
    corruption_.validate();
    if (!(window_ > 0.0)) {
      throw InvalidArgumentError("drift provider: window must be > 0");
    }
  }

  ProviderResult estimate(const RenderedView& view,
                          const CorrespondenceField& gt,
                          const CorrespondenceField& prior,
                          std::uint64_t seed) const override {
    if (prior.size() != gt.size()) {
      throw InvalidArgumentError("drift provider: prior/gt size mismatch");
    }
    auto eng = rng::make_engine(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ProviderResult out;
    out.field.targets.resize(gt.size());
    out.field.valid = gt.valid;
    out.outlier_mask.assign(gt.size(), 0);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (!gt.valid[i]) {
        out.field.targets[i] = gt.targets[i];
        continue;
      }
      const Eigen::Vector2d anchor =
          (i < prior.valid.size() && prior.valid[i]) ? prior.targets[i]
                                                     : view.points[i].pixel;
      const bool found = (gt.targets[i] - anchor).norm() <= window_;
      if (!found) {
        out.outlier_mask[i] = 1;
        out.field.targets[i] =
            anchor + rng::gaussian_vec2(eng, corruption_.noise_std);
        continue;
      }
      if (unit(eng) < corruption_.outlier_fraction) {
        out.outlier_mask[i] = 1;
        out.field.targets[i] =
            gt.targets[i] + rng::uniform_disk(eng, corruption_.outlier_radius);
      } else {
        out.field.targets[i] =
            gt.targets[i] + rng::gaussian_vec2(eng, corruption_.noise_std);
      }
    }
    return out;
  }

  double window() const { return window_; }

 private:
  CorruptionSpec corruption_;
  double window_;
};

}  // namespace poseref
