#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "poseref/correspondence.hpp"
#include "poseref/errors.hpp"
#include "poseref/metrics.hpp"
#include "poseref/model.hpp"
#include "poseref/refine.hpp"
#include "poseref/rng.hpp"
#include "poseref/scene.hpp"

namespace poseref {

inline constexpr const char* kVersion = "0.1.0";

/// One on/off combination of the two contribution toggles.
struct AblationSpec {
  bool weighting = true;
  bool rectification = true;
};

struct ModelSpec {
  std::string path;            // takes precedence when non-empty
  std::string builtin = "sphere";  // tetra | box-grid | sphere
  int n = 200;
  double diameter = 0.2;
  bool symmetric = false;
};

inline ObjectModel build_model(const ModelSpec& spec) {
  if (!spec.path.empty()) {
    return load_model(spec.path, spec.symmetric);
  }
  if (spec.builtin == "tetra") {
    ObjectModel m = make_tetrahedron(spec.diameter);
    m.symmetric = spec.symmetric;
    return m;
  }
  if (spec.builtin == "box-grid") {
    ObjectModel m = make_box_grid(spec.n, spec.diameter);
    m.symmetric = spec.symmetric;
    return m;
  }
  if (spec.builtin == "sphere") {
    return make_sphere(spec.n, spec.diameter, spec.symmetric);
  }
  throw ConfigError("unknown builtin model: " + spec.builtin);
}

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  std::uint64_t master_seed = 0;
  int scene_count = 1;
  std::string output_path;
  ModelSpec model;
  CameraIntrinsics intrinsics{572.4114, 573.57043, 325.2611, 242.04899, 640, 480};
  double min_distance = 0.7;
  double max_distance = 1.1;
  double lateral_extent = 0.05;
  std::vector<NoiseSpec> noise_grid = {NoiseSpec{}};
  std::vector<CorruptionSpec> corruption_grid = {CorruptionSpec{}};
  std::vector<AblationSpec> ablations = {AblationSpec{}};
  RefinementConfig refinement;

  void validate() const {
    if (scene_count < 1) throw ConfigError("scene_count must be >= 1");
    if (noise_grid.empty() || corruption_grid.empty() || ablations.empty()) {
      throw ConfigError("all grids must be non-empty");
    }
    if (experiment_id.find_first_of(",\n\r") != std::string::npos) {
      throw ConfigError("experiment_id must not contain commas or newlines");
    }
    intrinsics.validate();
    refinement.validate();
    for (const auto& n : noise_grid) n.validate();
    for (const auto& c : corruption_grid) c.validate();
  }
};

// ---------------------------------------------------------------------------
// JSON (de)serialization. nlohmann::json keeps keys sorted, so dumps are
// canonical and round-trip exactly.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const NoiseSpec& n) {
  return {{"rot_std_deg", n.rot_std_deg},
          {"trans_std_x", n.trans_std_x},
          {"trans_std_y", n.trans_std_y},
          {"trans_std_z", n.trans_std_z}};
}

inline NoiseSpec noise_from_json(const nlohmann::json& j) {
  NoiseSpec n;
  n.rot_std_deg = j.at("rot_std_deg").get<double>();
  n.trans_std_x = j.at("trans_std_x").get<double>();
  n.trans_std_y = j.at("trans_std_y").get<double>();
  n.trans_std_z = j.at("trans_std_z").get<double>();
  return n;
}

inline nlohmann::json to_json(const CorruptionSpec& c) {
  return {{"noise_std", c.noise_std},
          {"outlier_fraction", c.outlier_fraction},
          {"outlier_radius", c.outlier_radius}};
}

inline CorruptionSpec corruption_from_json(const nlohmann::json& j) {
  CorruptionSpec c;
  c.noise_std = j.at("noise_std").get<double>();
  c.outlier_fraction = j.at("outlier_fraction").get<double>();
  c.outlier_radius = j.at("outlier_radius").get<double>();
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment_id"] = c.experiment_id;
  j["master_seed"] = c.master_seed;
  j["scene_count"] = c.scene_count;
  j["output_path"] = c.output_path;
  j["model"] = {{"path", c.model.path},
                {"builtin", c.model.builtin},
                {"n", c.model.n},
                {"diameter", c.model.diameter},
                {"symmetric", c.model.symmetric}};
  j["intrinsics"] = {{"fx", c.intrinsics.fx},   {"fy", c.intrinsics.fy},
                     {"cx", c.intrinsics.cx},   {"cy", c.intrinsics.cy},
                     {"width", c.intrinsics.width},
                     {"height", c.intrinsics.height}};
  j["scene"] = {{"min_distance", c.min_distance},
                {"max_distance", c.max_distance},
                {"lateral_extent", c.lateral_extent}};
  j["noise_grid"] = nlohmann::json::array();
  for (const auto& n : c.noise_grid) j["noise_grid"].push_back(to_json(n));
  j["corruption_grid"] = nlohmann::json::array();
  for (const auto& g : c.corruption_grid) {
    j["corruption_grid"].push_back(to_json(g));
  }
  j["ablations"] = nlohmann::json::array();
  for (const auto& a : c.ablations) {
    j["ablations"].push_back(
        {{"weighting", a.weighting}, {"rectification", a.rectification}});
  }
  const auto& r = c.refinement;
  j["refinement"] = {
      {"recurrent_iterations", r.recurrent_iterations},
      {"rendering_cycles", r.rendering_cycles},
      {"provider", std::string(to_string(r.provider_mode))},
      {"drift_window", r.drift_window},
      {"descriptors",
       {{"dim", r.descriptors.dim},
        {"inlier_perturb", r.descriptors.inlier_perturb},
        {"sigma", r.descriptors.sigma}}},
      {"lm",
       {{"lambda0", r.lm.lambda0},
        {"lambda_up", r.lm.lambda_up},
        {"lambda_down", r.lm.lambda_down},
        {"max_iterations", r.lm.max_iterations},
        {"cost_tolerance", r.lm.cost_tolerance},
        {"step_tolerance", r.lm.step_tolerance},
        {"lambda_max", r.lm.lambda_max},
        {"marquardt_scaling", r.lm.marquardt_scaling}}}};
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.experiment_id = j.at("experiment_id").get<std::string>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.scene_count = j.at("scene_count").get<int>();
    c.output_path = j.at("output_path").get<std::string>();
    const auto& jm = j.at("model");
    c.model.path = jm.at("path").get<std::string>();
    c.model.builtin = jm.at("builtin").get<std::string>();
    c.model.n = jm.at("n").get<int>();
    c.model.diameter = jm.at("diameter").get<double>();
    c.model.symmetric = jm.at("symmetric").get<bool>();
    const auto& ji = j.at("intrinsics");
    c.intrinsics.fx = ji.at("fx").get<double>();
    c.intrinsics.fy = ji.at("fy").get<double>();
    c.intrinsics.cx = ji.at("cx").get<double>();
    c.intrinsics.cy = ji.at("cy").get<double>();
    c.intrinsics.width = ji.at("width").get<int>();
    c.intrinsics.height = ji.at("height").get<int>();
    const auto& js = j.at("scene");
    c.min_distance = js.at("min_distance").get<double>();
    c.max_distance = js.at("max_distance").get<double>();
    c.lateral_extent = js.at("lateral_extent").get<double>();
    c.noise_grid.clear();
    for (const auto& n : j.at("noise_grid")) {
      c.noise_grid.push_back(noise_from_json(n));
    }
    c.corruption_grid.clear();
    for (const auto& g : j.at("corruption_grid")) {
      c.corruption_grid.push_back(corruption_from_json(g));
    }
    c.ablations.clear();
    for (const auto& a : j.at("ablations")) {
      c.ablations.push_back({a.at("weighting").get<bool>(),
                             a.at("rectification").get<bool>()});
    }
    const auto& jr = j.at("refinement");
    c.refinement.recurrent_iterations =
        jr.at("recurrent_iterations").get<int>();
    c.refinement.rendering_cycles = jr.at("rendering_cycles").get<int>();
    const std::string provider = jr.at("provider").get<std::string>();
    if (provider == "oracle") {
      c.refinement.provider_mode = ProviderMode::oracle;
    } else if (provider == "drift") {
      c.refinement.provider_mode = ProviderMode::drift;
    } else {
      throw ConfigError("unknown provider: " + provider);
    }
    c.refinement.drift_window = jr.at("drift_window").get<double>();
    const auto& jd = jr.at("descriptors");
    c.refinement.descriptors.dim = jd.at("dim").get<int>();
    c.refinement.descriptors.inlier_perturb =
        jd.at("inlier_perturb").get<double>();
    c.refinement.descriptors.sigma = jd.at("sigma").get<double>();
    const auto& jl = jr.at("lm");
    c.refinement.lm.lambda0 = jl.at("lambda0").get<double>();
    c.refinement.lm.lambda_up = jl.at("lambda_up").get<double>();
    c.refinement.lm.lambda_down = jl.at("lambda_down").get<double>();
    c.refinement.lm.max_iterations = jl.at("max_iterations").get<int>();
    c.refinement.lm.cost_tolerance = jl.at("cost_tolerance").get<double>();
    c.refinement.lm.step_tolerance = jl.at("step_tolerance").get<double>();
    c.refinement.lm.lambda_max = jl.at("lambda_max").get<double>();
    c.refinement.lm.marquardt_scaling =
        jl.at("marquardt_scaling").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path,
                                    std::string* raw_text = nullptr) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not readable: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (raw_text) *raw_text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Trial execution
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string experiment_id;
  int grid_index = 0;
  int noise_index = 0;
  int corruption_index = 0;
  int ablation_index = 0;
  int scene_index = 0;
  std::uint64_t seed = 0;
  NoiseSpec noise;
  CorruptionSpec corruption;
  AblationSpec ablation;
  double add = std::numeric_limits<double>::infinity();
  double rotation_error_deg = std::numeric_limits<double>::infinity();
  double translation_error_m = std::numeric_limits<double>::infinity();
  int lm_iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

/// Trial seeds hash (master seed, grid point, scene index). Ablation arms
/// intentionally share seeds so that toggle comparisons are paired.
inline std::uint64_t trial_seed(std::uint64_t master, int noise_index,
                                int corruption_index, int scene_index) {
  return rng::derive_seed({master, 0x7214ULL,
                           static_cast<std::uint64_t>(noise_index),
                           static_cast<std::uint64_t>(corruption_index),
                           static_cast<std::uint64_t>(scene_index)});
}

inline ResultRow run_trial(const ExperimentConfig& config,
                           const ObjectModel& model, int noise_index,
                           int corruption_index, int ablation_index,
                           int scene_index) {
  ResultRow row;
  row.experiment_id = config.experiment_id;
  row.noise_index = noise_index;
  row.corruption_index = corruption_index;
  row.ablation_index = ablation_index;
  row.grid_index =
      (noise_index * static_cast<int>(config.corruption_grid.size()) +
       corruption_index) *
          static_cast<int>(config.ablations.size()) +
      ablation_index;
  row.scene_index = scene_index;
  row.noise = config.noise_grid[noise_index];
  row.corruption = config.corruption_grid[corruption_index];
  row.ablation = config.ablations[ablation_index];
  row.seed = trial_seed(config.master_seed, noise_index, corruption_index,
                        scene_index);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    SceneSpec spec;
    spec.model = model;
    spec.intrinsics = config.intrinsics;
    spec.min_distance = config.min_distance;
    spec.max_distance = config.max_distance;
    spec.lateral_extent = config.lateral_extent;
    spec.noise = row.noise;
    const Scene scene = generate_scene(spec, row.seed);

    RefinementConfig rc = config.refinement;
    rc.corruption = row.corruption;
    rc.use_weighting = row.ablation.weighting;
    rc.use_rectification = row.ablation.rectification;
    const auto provider = make_provider(rc);

    const RefineResult result = refine(scene, *provider, rc);
    row.add = pose_distance(result.pose, scene.gt_pose, model);
    row.rotation_error_deg = rotation_error_deg(result.pose, scene.gt_pose);
    row.translation_error_m = translation_error_m(result.pose, scene.gt_pose);
    row.lm_iterations = result.lm_iterations_total;
    row.converged = result.success;
  } catch (const SceneGenerationError&) {
    // recorded as a failed row; defaults already mark it
  }
  const auto t1 = std::chrono::steady_clock::now();
  row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return row;
}

/// Runs the full (noise x corruption x ablation) x scene sweep on a bounded
/// worker pool. Rows come back in deterministic grid-then-scene order
/// regardless of scheduling.
inline std::vector<ResultRow> run_trials(const ExperimentConfig& config,
                                         int threads = 1) {
  config.validate();
  const ObjectModel model = build_model(config.model);

  struct Task {
    int ni, ci, ai, si;
  };
  std::vector<Task> tasks;
  for (int ni = 0; ni < static_cast<int>(config.noise_grid.size()); ++ni) {
    for (int ci = 0; ci < static_cast<int>(config.corruption_grid.size());
         ++ci) {
      for (int ai = 0; ai < static_cast<int>(config.ablations.size()); ++ai) {
        for (int si = 0; si < config.scene_count; ++si) {
          tasks.push_back({ni, ci, ai, si});
        }
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& t = tasks[i];
      rows[i] = run_trial(config, model, t.ni, t.ci, t.ai, t.si);
    }
  };

  int n_workers = threads;
  if (n_workers <= 0) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
  }
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

// ---------------------------------------------------------------------------
// CSV emission and ingestion
// ---------------------------------------------------------------------------

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string format_full(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* csv_header(bool timing) {
  return timing
             ? "experiment_id,grid_index,noise_index,corruption_index,"
               "ablation_index,scene_index,seed,rot_noise_deg,trans_noise_x_m,"
               "trans_noise_y_m,trans_noise_z_m,corr_noise_px,outlier_fraction,"
               "outlier_radius_px,weighting,rectification,add_m,"
               "rotation_error_deg,translation_error_m,lm_iterations,converged,"
               "wall_ms"
             : "experiment_id,grid_index,noise_index,corruption_index,"
               "ablation_index,scene_index,seed,rot_noise_deg,trans_noise_x_m,"
               "trans_noise_y_m,trans_noise_z_m,corr_noise_px,outlier_fraction,"
               "outlier_radius_px,weighting,rectification,add_m,"
               "rotation_error_deg,translation_error_m,lm_iterations,converged";
}

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                      const ExperimentConfig& config,
                      const std::string& config_text, double model_diameter,
                      bool timing = false) {
  const std::string canonical = to_json(config).dump();
  out << "# poseref_version=" << kVersion << "\n";
  out << "# config_hash=" << std::hex << fnv1a64(canonical) << std::dec
      << "\n";
  out << "# master_seed=" << config.master_seed << "\n";
  out << "# model_diameter=" << format_full(model_diameter) << "\n";
  out << "# config_begin\n";
  std::istringstream cfg(config_text.empty() ? to_json(config).dump(2)
                                             : config_text);
  std::string line;
  while (std::getline(cfg, line)) out << "# " << line << "\n";
  out << "# config_end\n";
  out << csv_header(timing) << "\n";
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << r.grid_index << ',' << r.noise_index
        << ',' << r.corruption_index << ',' << r.ablation_index << ','
        << r.scene_index << ',' << r.seed << ','
        << format_g9(r.noise.rot_std_deg) << ','
        << format_g9(r.noise.trans_std_x) << ','
        << format_g9(r.noise.trans_std_y) << ','
        << format_g9(r.noise.trans_std_z) << ','
        << format_g9(r.corruption.noise_std) << ','
        << format_g9(r.corruption.outlier_fraction) << ','
        << format_g9(r.corruption.outlier_radius) << ','
        << (r.ablation.weighting ? 1 : 0) << ','
        << (r.ablation.rectification ? 1 : 0) << ',' << format_g9(r.add)
        << ',' << format_g9(r.rotation_error_deg) << ','
        << format_g9(r.translation_error_m) << ',' << r.lm_iterations << ','
        << (r.converged ? 1 : 0);
    if (timing) out << ',' << format_g9(r.wall_ms);
    out << "\n";
  }
}

struct CsvContents {
  std::vector<ResultRow> rows;
  std::map<std::string, std::string> metadata;
  double model_diameter = 0.0;
};

inline CsvContents read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("rows file not readable: " + path);
  CsvContents contents;
  std::string line;
  bool header_seen = false;
  bool has_timing = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.size() > 2 ? line.substr(2) : "";
      const auto eq = body.find('=');
      if (eq != std::string::npos && body.find(' ') > eq) {
        contents.metadata[body.substr(0, eq)] = body.substr(eq + 1);
      }
      continue;
    }
    if (!header_seen) {
      has_timing = line.find(",wall_ms") != std::string::npos;
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    const std::size_t expected = has_timing ? 22 : 21;
    if (f.size() != expected) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(expected) + " fields");
    }
    ResultRow r;
    r.experiment_id = f[0];
    r.grid_index = std::stoi(f[1]);
    r.noise_index = std::stoi(f[2]);
    r.corruption_index = std::stoi(f[3]);
    r.ablation_index = std::stoi(f[4]);
    r.scene_index = std::stoi(f[5]);
    r.seed = std::stoull(f[6]);
    r.noise.rot_std_deg = std::stod(f[7]);
    r.noise.trans_std_x = std::stod(f[8]);
    r.noise.trans_std_y = std::stod(f[9]);
    r.noise.trans_std_z = std::stod(f[10]);
    r.corruption.noise_std = std::stod(f[11]);
    r.corruption.outlier_fraction = std::stod(f[12]);
    r.corruption.outlier_radius = std::stod(f[13]);
    r.ablation.weighting = f[14] == "1";
    r.ablation.rectification = f[15] == "1";
    r.add = std::stod(f[16]);
    r.rotation_error_deg = std::stod(f[17]);
    r.translation_error_m = std::stod(f[18]);
    r.lm_iterations = std::stoi(f[19]);
    r.converged = f[20] == "1";
    if (has_timing) r.wall_ms = std::stod(f[21]);
    contents.rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(path + ": missing CSV header");
  const auto it = contents.metadata.find("model_diameter");
  if (it != contents.metadata.end()) {
    contents.model_diameter = std::stod(it->second);
  }
  return contents;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

struct SummaryRow {
  int noise_index = 0;
  int corruption_index = 0;
  int ablation_index = 0;
  NoiseSpec noise;
  CorruptionSpec corruption;
  AblationSpec ablation;
  int count = 0;
  int failed = 0;
  double accuracy_002d = 0.0;
  double accuracy_005d = 0.0;
  double accuracy_01d = 0.0;
  double auc = 0.0;
  double mean_rotation_error_deg = 0.0;
  double mean_translation_error_m = 0.0;
};

/// Groups rows by (noise, corruption, ablation) indices -- lexicographic
/// key order -- and aggregates the standard accuracy block per group.
/// Failed trials count toward every accuracy denominator; error means are
/// taken over finite values only.
inline std::vector<SummaryRow> emit_summary(const std::vector<ResultRow>& rows,
                                            double model_diameter) {
  if (rows.empty()) throw EmptyInputError("emit_summary: no rows");
  if (!(model_diameter > 0.0)) {
    throw InvalidArgumentError("emit_summary: diameter must be > 0");
  }
  std::map<std::tuple<int, int, int>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    groups[{r.noise_index, r.corruption_index, r.ablation_index}].push_back(
        &r);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    s.noise_index = std::get<0>(key);
    s.corruption_index = std::get<1>(key);
    s.ablation_index = std::get<2>(key);
    s.noise = members.front()->noise;
    s.corruption = members.front()->corruption;
    s.ablation = members.front()->ablation;
    s.count = static_cast<int>(members.size());
    std::vector<double> adds;
    adds.reserve(members.size());
    double rot_sum = 0.0, trans_sum = 0.0;
    int finite = 0;
    for (const auto* r : members) {
      adds.push_back(r->add);
      if (!r->converged) ++s.failed;
      if (std::isfinite(r->rotation_error_deg) &&
          std::isfinite(r->translation_error_m)) {
        rot_sum += r->rotation_error_deg;
        trans_sum += r->translation_error_m;
        ++finite;
      }
    }
    s.accuracy_002d = threshold_accuracy(adds, model_diameter, 0.02);
    s.accuracy_005d = threshold_accuracy(adds, model_diameter, 0.05);
    s.accuracy_01d = threshold_accuracy(adds, model_diameter, 0.10);
    s.auc = auc_add(adds);
    s.mean_rotation_error_deg = finite > 0 ? rot_sum / finite : 0.0;
    s.mean_translation_error_m = finite > 0 ? trans_sum / finite : 0.0;
    out.push_back(s);
  }
  return out;
}

inline void write_summary_csv(std::ostream& out,
                              const std::vector<SummaryRow>& summary) {
  out << "noise_index,corruption_index,ablation_index,rot_noise_deg,"
         "trans_noise_z_m,corr_noise_px,outlier_fraction,weighting,"
         "rectification,count,failed,acc_002d,acc_005d,acc_01d,auc,"
         "mean_rotation_error_deg,mean_translation_error_m\n";
  for (const auto& s : summary) {
    out << s.noise_index << ',' << s.corruption_index << ','
        << s.ablation_index << ',' << format_g9(s.noise.rot_std_deg) << ','
        << format_g9(s.noise.trans_std_z) << ','
        << format_g9(s.corruption.noise_std) << ','
        << format_g9(s.corruption.outlier_fraction) << ','
        << (s.ablation.weighting ? 1 : 0) << ','
        << (s.ablation.rectification ? 1 : 0) << ',' << s.count << ','
        << s.failed << ',' << format_g9(s.accuracy_002d) << ','
        << format_g9(s.accuracy_005d) << ',' << format_g9(s.accuracy_01d)
        << ',' << format_g9(s.auc) << ','
        << format_g9(s.mean_rotation_error_deg) << ','
        << format_g9(s.mean_translation_error_m) << "\n";
  }
}

inline std::string summary_table(const std::vector<SummaryRow>& summary) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%3s %3s %3s | %9s %8s %8s %4s %4s | %5s %4s | %8s %8s "
                "%8s %8s | %10s %12s\n",
                "ni", "ci", "ai", "rot(deg)", "noisepx", "outfrac",
                "wgt", "rect", "count", "fail", "acc.02d", "acc.05d",
                "acc.10d", "auc", "rot_err", "trans_err");
  out << buf;
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof(buf),
                  "%3d %3d %3d | %9.3g %8.3g %8.3g %4d %4d | %5d %4d | "
                  "%8.2f %8.2f %8.2f %8.2f | %10.4g %12.4g\n",
                  s.noise_index, s.corruption_index, s.ablation_index,
                  s.noise.rot_std_deg, s.corruption.noise_std,
                  s.corruption.outlier_fraction, s.ablation.weighting,
                  s.ablation.rectification, s.count, s.failed,
                  s.accuracy_002d, s.accuracy_005d, s.accuracy_01d, s.auc,
                  s.mean_rotation_error_deg, s.mean_translation_error_m);
    out << buf;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Top-level experiment entry point
// ---------------------------------------------------------------------------

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  EvalReport overall;
  double model_diameter = 0.0;
};

/// Full sweep: validates inputs, opens the output up front (startup
/// failures happen before any computation), runs all trials, writes one
/// row per trial plus provenance metadata, and returns aggregates.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       int threads = 1,
                                       const std::string& config_text = "",
                                       bool timing = false) {
  config.validate();
  const ObjectModel model = build_model(config.model);

  std::ofstream out;
  if (!config.output_path.empty()) {
    out.open(config.output_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("output not writable: " + config.output_path);
    }
  }

  ExperimentResult result;
  result.model_diameter = model.diameter;
  result.rows = run_trials(config, threads);
  result.summary = emit_summary(result.rows, model.diameter);
  std::vector<double> adds;
  adds.reserve(result.rows.size());
  for (const auto& r : result.rows) adds.push_back(r.add);
  result.overall = make_eval_report(std::move(adds), model.diameter);

  if (out.is_open()) {
    write_csv(out, result.rows, config, config_text, model.diameter, timing);
  }
  return result;
}

}  // namespace poseref
