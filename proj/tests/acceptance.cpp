// Acceptance suite: runs the eight release criteria end to end and prints
// one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "poseref/poseref.hpp"
#include "test_support.hpp"

using namespace poseref;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const CameraIntrinsics kCam{572.4114, 573.57043, 325.2611, 242.04899, 640, 480};

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Geometry: exp/log round trips and the matrix-exponential oracle.
Outcome criterion_geometry() {
  std::mt19937_64 eng(0xA11CE);
  double worst_rt = 0.0, worst_oracle = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Twist xi = testsupport::random_twist(eng, 3.0);
    const PoseSE3 p = exp(xi);
    const Twist back = log(p);
    const PoseSE3 again = exp(back);
    const double rt = (again.rotation - p.rotation).norm() +
                      (again.translation - p.translation).norm() +
                      (back.vector() - xi.vector()).norm();
    worst_rt = std::max(worst_rt, rt);
    const Eigen::Matrix4d oracle =
        testsupport::expm(testsupport::twist_matrix(xi));
    worst_oracle = std::max(worst_oracle, (p.matrix() - oracle).norm());
  }
  Outcome out;
  out.pass = worst_rt < 1e-10 && worst_oracle < 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "worst round trip %.2e (<1e-10), worst vs expm %.2e (<1e-9)",
                worst_rt, worst_oracle);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 2. Analytic Jacobian and gradient against central finite differences.
Outcome criterion_jacobian() {
  std::mt19937_64 eng(0xBEE);
  const double h = 1e-6;
  double worst_j = 0.0, worst_g = 0.0;
  int samples = 0;
  while (samples < 1000) {
    const ObjectModel model = make_sphere(4 + samples % 5, 0.2);
    const RenderedView view = [&] {
      PoseSE3 p;
      p.translation = {0.0, 0.0, 0.9};
      return render_view(model, p, kCam);
    }();
    const PoseSE3 delta = exp(testsupport::random_twist(eng, 0.25, 0.05));
    CorrespondenceField field = ground_truth_field(view, delta, kCam);
    for (auto& t : field.targets) t += Eigen::Vector2d(1.5, -0.5);
    std::uniform_real_distribution<double> uw(0.2, 1.0);
    std::vector<double> w;
    for (std::size_t i = 0; i < view.points.size(); ++i) w.push_back(uw(eng));
    PoseProblem problem;
    try {
      problem = make_problem(view, field, w, kCam);
    } catch (const Error&) {
      continue;
    }
    const Twist xi = testsupport::random_twist(eng, 0.12, 0.03);

    const Eigen::MatrixXd j = jacobian(problem, xi);
    const Eigen::VectorXd r = residuals(problem, xi);
    Vector6d grad = Vector6d::Zero();
    for (std::size_t i = 0; i < problem.size(); ++i) {
      grad += -2.0 * problem.weights[i] *
              j.block<2, 6>(2 * static_cast<int>(i), 0).transpose() *
              r.segment<2>(2 * static_cast<int>(i));
    }
    for (int k = 0; k < 6; ++k) {
      Eigen::Matrix<double, 6, 1> step = Eigen::Matrix<double, 6, 1>::Zero();
      step(k) = h;
      const Twist plus = left_update(Twist::FromVector(step), xi);
      const Twist minus = left_update(Twist::FromVector(-step), xi);
      const Eigen::VectorXd fd =
          (residuals(problem, plus) - residuals(problem, minus)) / (2.0 * h);
      worst_j = std::max(
          worst_j, (j.col(k) + fd).norm() / std::max(1.0, fd.norm()));
      const double fd_e =
          (objective(problem, plus) - objective(problem, minus)) / (2.0 * h);
      worst_g = std::max(worst_g, std::abs(grad(k) - fd_e) /
                                      std::max(1.0, std::abs(fd_e)));
    }
    samples += static_cast<int>(problem.size());
  }
  Outcome out;
  out.pass = worst_j < 1e-5 && worst_g < 1e-5;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d point samples, worst Jacobian rel %.2e, worst gradient "
                "rel %.2e (<1e-5)",
                samples, worst_j, worst_g);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 3. Noiseless convergence under the standard initial-pose noise model.
Outcome criterion_noiseless_convergence() {
  ExperimentConfig config;
  config.experiment_id = "acceptance-noiseless";
  config.master_seed = 3003;
  config.scene_count = 1000;
  config.model.builtin = "sphere";
  config.model.n = 500;
  config.intrinsics = kCam;
  config.noise_grid = {NoiseSpec{10.0, 0.03, 0.03, 0.15}};
  config.corruption_grid = {CorruptionSpec{0.0, 0.0, 50.0}};
  const std::vector<ResultRow> rows = run_trials(config, 0);
  int good = 0;
  for (const auto& r : rows) {
    good += (r.converged && r.rotation_error_deg < 0.01 &&
             r.translation_error_m < 1e-4);
  }
  Outcome out;
  out.pass = good >= 990;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d/1000 trials reached rot < 0.01 deg and trans < 0.1 mm "
                "(need >= 990)",
                good);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 4. Similarity-weighting ablation under 30% gross outliers.
Outcome criterion_weighting_ablation() {
  ExperimentConfig config;
  config.experiment_id = "acceptance-weighting";
  config.master_seed = 4004;
  config.scene_count = 200;
  config.model.builtin = "sphere";
  config.model.n = 40;
  config.intrinsics = kCam;
  config.noise_grid = {NoiseSpec{10.0, 0.03, 0.03, 0.15}};
  config.corruption_grid = {CorruptionSpec{1.0, 0.30, 50.0}};
  config.ablations = {{true, true}, {false, true}};
  config.refinement.descriptors.inlier_perturb = 0.05;
  config.refinement.descriptors.sigma = 1.0;
  const std::vector<ResultRow> rows = run_trials(config, 0);
  const ObjectModel model = build_model(config.model);
  const std::vector<SummaryRow> summary = emit_summary(rows, model.diameter);
  double w01 = 0, u01 = 0, w005 = 0, u005 = 0;
  for (const auto& s : summary) {
    if (s.ablation.weighting) {
      w01 = s.accuracy_01d;
      w005 = s.accuracy_005d;
    } else {
      u01 = s.accuracy_01d;
      u005 = s.accuracy_005d;
    }
  }
  Outcome out;
  out.pass = (w01 - u01 >= 10.0) && (w005 >= u005);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "0.1d: weighted %.1f%% vs unweighted %.1f%% (need +10pp); "
                "0.05d: %.1f%% vs %.1f%% (need >=)",
                w01, u01, w005, u005);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 5. Rectification ablation with the window-limited drift provider.
Outcome criterion_rectification_ablation() {
  ExperimentConfig config;
  config.experiment_id = "acceptance-rectification";
  config.master_seed = 5005;
  config.scene_count = 200;
  config.model.builtin = "box-grid";
  config.model.n = 6;
  config.intrinsics = kCam;
  config.min_distance = 0.9;
  config.max_distance = 1.1;
  config.lateral_extent = 0.03;
  config.noise_grid = {NoiseSpec{20.0, 0.0, 0.0, 0.0}};
  config.corruption_grid = {CorruptionSpec{1.0, 0.0, 50.0}};
  config.ablations = {{true, true}, {true, false}};
  config.refinement.provider_mode = ProviderMode::drift;
  config.refinement.drift_window = 8.0;
  config.refinement.descriptors.sigma = 0.3;
  const std::vector<ResultRow> rows = run_trials(config, 0);
  const ObjectModel model = build_model(config.model);
  const std::vector<SummaryRow> summary = emit_summary(rows, model.diameter);
  double with_rect = 0, without_rect = 0;
  for (const auto& s : summary) {
    (s.ablation.rectification ? with_rect : without_rect) = s.accuracy_01d;
  }
  Outcome out;
  out.pass = with_rect - without_rect >= 5.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "success at 0.1d: with rectification %.1f%% vs without %.1f%% "
                "(need margin >= 5pp)",
                with_rect, without_rect);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 6. Robustness curve: accuracy monotone in rotational noise.
Outcome criterion_robustness_curve() {
  ExperimentConfig config;
  config.experiment_id = "acceptance-robustness";
  config.master_seed = 6006;
  config.scene_count = 200;
  config.model.builtin = "box-grid";
  config.model.n = 6;
  config.intrinsics = kCam;
  config.min_distance = 0.9;
  config.max_distance = 1.1;
  config.lateral_extent = 0.03;
  config.noise_grid = {NoiseSpec{5.0, 0.0, 0.0, 0.0},
                       NoiseSpec{10.0, 0.0, 0.0, 0.0},
                       NoiseSpec{15.0, 0.0, 0.0, 0.0},
                       NoiseSpec{20.0, 0.0, 0.0, 0.0},
                       NoiseSpec{25.0, 0.0, 0.0, 0.0}};
  config.corruption_grid = {CorruptionSpec{1.0, 0.0, 50.0}};
  config.refinement.provider_mode = ProviderMode::drift;
  config.refinement.drift_window = 8.0;
  config.refinement.descriptors.sigma = 0.3;
  const std::vector<ResultRow> rows = run_trials(config, 0);
  const ObjectModel model = build_model(config.model);
  const std::vector<SummaryRow> summary = emit_summary(rows, model.diameter);

  std::vector<double> curve(summary.size());
  for (const auto& s : summary) {
    curve[static_cast<std::size_t>(s.noise_index)] = s.accuracy_01d;
  }
  int inversions = 0;
  double worst_inversion = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] > curve[i - 1]) {
      ++inversions;
      worst_inversion = std::max(worst_inversion, curve[i] - curve[i - 1]);
    }
  }
  Outcome out;
  out.pass = (inversions == 0) || (inversions == 1 && worst_inversion <= 2.0);
  std::ostringstream detail;
  detail << "acc@0.1d over rot std {5,10,15,20,25} deg:";
  for (double c : curve) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), " %.1f", c);
    detail << buf;
  }
  detail << " (" << inversions << " inversions, worst " << worst_inversion
         << "pp)";
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 7. Metric oracles: brute-force equality, symmetry case, AUC enumeration.
Outcome criterion_metric_oracles() {
  std::mt19937_64 eng(0x7777);
  std::normal_distribution<double> gauss(0.0, 0.05);
  bool add_exact = true, adds_exact = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Eigen::Vector3d> verts;
    for (int i = 0; i < 30; ++i) {
      verts.emplace_back(gauss(eng), gauss(eng), gauss(eng));
    }
    const ObjectModel m = make_model(std::move(verts));
    const PoseSE3 a = testsupport::random_pose(eng, 2.0);
    const PoseSE3 b = testsupport::random_pose(eng, 2.0);

    double add_sum = 0.0;
    for (const auto& v : m.vertices) {
      const Eigen::Vector3d pa = a.rotation * v + a.translation;
      const Eigen::Vector3d pb = b.rotation * v + b.translation;
      const double dx = pa.x() - pb.x(), dy = pa.y() - pb.y(),
                   dz = pa.z() - pb.z();
      add_sum += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    add_exact &= (add_metric(a, b, m) == add_sum / 30.0);

    double adds_sum = 0.0;
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
      const Eigen::Vector3d pa = a.rotation * m.vertices[i] + a.translation;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t jj = 0; jj < m.vertices.size(); ++jj) {
        const Eigen::Vector3d pb = b.rotation * m.vertices[jj] + b.translation;
        const double dx = pa.x() - pb.x(), dy = pa.y() - pb.y(),
                     dz = pa.z() - pb.z();
        best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
      }
      adds_sum += best;
    }
    adds_exact &= (adds_metric(a, b, m) == adds_sum / 30.0);
  }

  // constructed 4-fold symmetric model under a quarter turn
  std::vector<Eigen::Vector3d> sq;
  for (double h : {-0.02, 0.02}) {
    sq.emplace_back(0.05, 0.05, h);
    sq.emplace_back(-0.05, 0.05, h);
    sq.emplace_back(-0.05, -0.05, h);
    sq.emplace_back(0.05, -0.05, h);
  }
  const ObjectModel square = make_model(std::move(sq), true);
  PoseSE3 quarter;
  quarter.rotation << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  PoseSE3 gt;
  gt.translation = {0.0, 0.0, 1.0};
  const PoseSE3 hat = compose(gt, quarter);
  const bool symmetry_ok =
      adds_metric(hat, gt, square) == 0.0 && add_metric(hat, gt, square) > 0.0;

  // AUC protocol vs direct enumeration over the 100-threshold grid
  bool auc_ok = true;
  std::uniform_real_distribution<double> uv(0.0, 0.15);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values;
    for (int i = 0; i < 37; ++i) values.push_back(uv(eng));
    double enumerated = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double tau = 0.001 * static_cast<double>(k);
      int count = 0;
      for (double v : values) count += (v < tau);
      enumerated += 100.0 * count / static_cast<double>(values.size());
    }
    enumerated /= 100.0;
    auc_ok &= (auc_add(values) == enumerated);
  }
  auc_ok &= (auc_add({0.05}) == 50.0);

  Outcome out;
  out.pass = add_exact && adds_exact && symmetry_ok && auc_ok;
  std::ostringstream detail;
  detail << "ADD exact " << (add_exact ? "yes" : "NO") << ", ADD-S exact "
         << (adds_exact ? "yes" : "NO") << ", symmetric-square case "
         << (symmetry_ok ? "ok" : "BAD") << ", AUC enumeration "
         << (auc_ok ? "ok" : "BAD");
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 8. Determinism: the same sweep twice produces byte-identical CSV.
Outcome criterion_determinism() {
  ExperimentConfig config;
  config.experiment_id = "acceptance-determinism";
  config.master_seed = 8008;
  config.scene_count = 5;
  config.model.builtin = "sphere";
  config.model.n = 80;
  config.intrinsics = kCam;
  config.noise_grid = {NoiseSpec{8.0, 0.02, 0.02, 0.1},
                       NoiseSpec{15.0, 0.03, 0.03, 0.15}};
  config.corruption_grid = {CorruptionSpec{1.0, 0.2, 40.0},
                            CorruptionSpec{2.0, 0.0, 50.0}};
  config.ablations = {{true, true}, {false, false}};
  config.output_path = temp_path("poseref_acceptance_det.csv");

  run_experiment(config, 2);
  const std::string first = slurp(config.output_path);
  run_experiment(config, 2);
  const std::string second = slurp(config.output_path);
  std::remove(config.output_path.c_str());

  Outcome out;
  out.pass = !first.empty() && first == second;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "two sweeps, %zu bytes each, byte-identical: %s",
                first.size(), out.pass ? "yes" : "NO");
  out.detail = buf;
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    Outcome (*run)();
    double budget_s;
  };
  const Entry entries[] = {
      {1, "geometry round trips + matrix-exponential oracle",
       criterion_geometry, 5.0},
      {2, "analytic Jacobian and gradient vs finite differences",
       criterion_jacobian, 10.0},
      {3, "noiseless convergence under standard initial-pose noise",
       criterion_noiseless_convergence, 60.0},
      {4, "similarity-weighting ablation under outliers",
       criterion_weighting_ablation, 120.0},
      {5, "correspondence rectification ablation (drift provider)",
       criterion_rectification_ablation, 120.0},
      {6, "robustness curve monotone in rotational noise",
       criterion_robustness_curve, 300.0},
      {7, "metric oracles (ADD / ADD-S / AUC)", criterion_metric_oracles,
       10.0},
      {8, "deterministic byte-identical sweep output", criterion_determinism,
       600.0},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = secs < entry.budget_s;
    const bool pass = outcome.pass && in_budget;
    failures += !pass;
    std::printf("[%d] %s  %s -- %s [%.1fs%s]\n", entry.id,
                pass ? "PASS" : "FAIL", entry.name, outcome.detail.c_str(),
                secs, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
