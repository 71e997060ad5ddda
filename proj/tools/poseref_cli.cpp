// Benchmark CLI: deterministic pose-refinement sweeps, summaries, and
// built-in model generation. See README for the config format.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "poseref/poseref.hpp"

namespace {

int cmd_run(const std::string& config_path, std::uint64_t seed_override,
            bool has_seed_override, const std::string& out_override,
            int threads, bool timing) {
  std::string config_text;
  poseref::ExperimentConfig config =
      poseref::load_config(config_path, &config_text);
  if (has_seed_override) {
    config.master_seed = seed_override;
    config_text = poseref::to_json(config).dump(2);
  }
  if (!out_override.empty()) {
    config.output_path = out_override;
    config_text = poseref::to_json(config).dump(2);
  }
  if (config.output_path.empty()) {
    throw poseref::ConfigError("no output path (config output_path or --out)");
  }

  const poseref::ExperimentResult result =
      poseref::run_experiment(config, threads, config_text, timing);

  int failed = 0;
  for (const auto& r : result.rows) failed += !r.converged;
  std::cout << "wrote " << result.rows.size() << " rows to "
            << config.output_path << " (" << failed << " failed trials)\n\n";
  std::cout << poseref::summary_table(result.summary);
  std::cout << "\noverall: acc@0.02d=" << result.overall.accuracy_002d
            << "% acc@0.05d=" << result.overall.accuracy_005d
            << "% acc@0.1d=" << result.overall.accuracy_01d
            << "% auc=" << result.overall.auc << "%\n";
  return 0;
}

int cmd_summarize(const std::string& rows_path, const std::string& out_path) {
  const poseref::CsvContents contents = poseref::read_csv(rows_path);
  if (contents.rows.empty()) {
    throw poseref::EmptyInputError("no rows in " + rows_path);
  }
  if (!(contents.model_diameter > 0.0)) {
    throw poseref::ParseError(rows_path +
                              ": missing model_diameter metadata");
  }
  const auto summary =
      poseref::emit_summary(contents.rows, contents.model_diameter);
  std::cout << poseref::summary_table(summary);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw poseref::Error("output not writable: " + out_path);
    poseref::write_summary_csv(out, summary);
    std::cout << "wrote summary to " << out_path << "\n";
  }
  return 0;
}

int cmd_gen_model(const std::string& shape, int n, double diameter,
                  const std::string& out_path) {
  poseref::ModelSpec spec;
  spec.builtin = shape;
  spec.n = n;
  spec.diameter = diameter;
  const poseref::ObjectModel model = poseref::build_model(spec);
  std::string comment = "poseref model: " + shape;
  if (shape != "tetra") comment += " n=" + std::to_string(n);
  comment += " diameter=" + poseref::format_g9(model.diameter);
  poseref::save_model(model, out_path, comment);
  std::cout << "wrote " << model.vertices.size() << " vertices to "
            << out_path << " (diameter " << poseref::format_g9(model.diameter)
            << " m)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correspondence-field 6-DoF pose refinement benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  std::string out_override;
  int threads = 1;
  bool timing = false;
  auto* run = app.add_subcommand("run", "run a benchmark sweep from a config");
  run->add_option("config", config_path, "config JSON path")->required();
  auto* seed_opt =
      run->add_option("--seed", seed_override, "override the master seed");
  run->add_option("--out", out_override, "override the output CSV path");
  run->add_option("--threads", threads,
                  "worker threads (0 = hardware concurrency)");
  run->add_flag("--timing", timing,
                "append a wall_ms column (breaks byte-determinism)");

  std::string rows_path;
  std::string summary_out;
  auto* summarize =
      app.add_subcommand("summarize", "aggregate a previously written CSV");
  summarize->add_option("rows", rows_path, "rows CSV path")->required();
  summarize->add_option("--out", summary_out, "also write a summary CSV");

  std::string shape;
  int gen_n = 200;
  double gen_diameter = 0.2;
  std::string model_out = "model.xyz";
  auto* gen = app.add_subcommand("gen-model", "write a built-in point model");
  gen->add_option("shape", shape, "tetra | box-grid | sphere")->required();
  gen->add_option("--n", gen_n, "resolution (box-grid edge / sphere count)");
  gen->add_option("--diameter", gen_diameter, "model diameter in meters");
  gen->add_option("--out", model_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, seed_override, seed_opt->count() > 0,
                     out_override, threads, timing);
    }
    if (summarize->parsed()) {
      return cmd_summarize(rows_path, summary_out);
    }
    if (gen->parsed()) {
      return cmd_gen_model(shape, gen_n, gen_diameter, model_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
