// Command-line front end: registration, tactile recovery, sampling, synthetic
// scenes, and the benchmark studies. All tables are CSV with a header row;
// numeric output is deterministic for a fixed seed (timing columns excepted).
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tacloc/bench.hpp"
#include "tacloc/config.hpp"
#include "tacloc/io.hpp"
#include "tacloc/mesh.hpp"
#include "tacloc/solver.hpp"
#include "tacloc/tactile.hpp"

using namespace tacloc;

namespace {

constexpr double kDeg = M_PI / 180.0;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

/// --mesh accepts either a procedural mesh name or a .off/.stl path.
TriangleMesh resolve_mesh(const std::string& spec) {
  const std::vector<std::string> names = procedural_mesh_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) {
    return make_procedural_mesh(spec);
  }
  return load_mesh(spec);
}

PipelineConfig resolve_config(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

void write_timings_csv(const std::string& path, const StageTimings& t) {
  std::ofstream out = open_out(path);
  out << "stage,milliseconds\n";
  out << "downsample," << fmt(t.downsample_ms) << "\n";
  out << "keypoints," << fmt(t.keypoints_ms) << "\n";
  out << "descriptors," << fmt(t.descriptors_ms) << "\n";
  out << "matching," << fmt(t.matching_ms) << "\n";
  out << "graph," << fmt(t.graph_ms) << "\n";
  out << "cliques," << fmt(t.cliques_ms) << "\n";
  out << "estimation," << fmt(t.estimation_ms) << "\n";
  out << "verification," << fmt(t.verification_ms) << "\n";
}

void write_hypotheses_csv(const std::string& path, const RegistrationResult& result) {
  // Ranked as the verifier scores: residual ascending, larger cliques first
  // on ties, then input order.
  std::vector<std::size_t> order(result.hypotheses.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const PoseHypothesis& ha = result.hypotheses[a];
    const PoseHypothesis& hb = result.hypotheses[b];
    if (ha.residual != hb.residual) return ha.residual < hb.residual;
    return ha.clique_size > hb.clique_size;
  });
  std::ofstream out = open_out(path);
  out << "rank,residual,weight,clique_size,converged";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out << ",m" << r << c;
  }
  out << "\n";
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const PoseHypothesis& h = result.hypotheses[order[rank]];
    out << rank + 1 << "," << fmt(h.residual) << "," << fmt(h.weight) << ","
        << h.clique_size << "," << (h.converged ? 1 : 0);
    const Mat4 m = h.transform.matrix();
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) out << "," << fmt(m(r, c));
    }
    out << "\n";
  }
}

int run_register(const std::string& source_path, const std::string& target_path,
                 const std::string& config_path, const std::string& out_path,
                 const std::string& hyp_path, const std::string& timings_path) {
  const PipelineConfig config = resolve_config(config_path);
  const OrientedPointCloud source = load_ply(source_path);
  const OrientedPointCloud target = load_ply(target_path);
  const RegistrationResult result = register_clouds(source, target, config);

  if (!timings_path.empty()) write_timings_csv(timings_path, result.timings);
  if (!hyp_path.empty()) write_hypotheses_csv(hyp_path, result);

  if (!result.success) {
    std::cerr << "registration failed: " << result.failure_reason << "\n";
    return 1;
  }
  save_pose(out_path, result.best.transform);
  std::cout << "pose -> " << out_path << " (residual " << result.best.residual
            << ", clique " << result.best.clique_size << ", " << result.hypotheses.size()
            << " hypotheses)\n";
  return 0;
}

int run_touch(const std::string& gx_path, const std::string& gy_path,
              const std::string& config_path, const std::string& out_path,
              const std::string& height_out) {
  const PipelineConfig config = resolve_config(config_path);
  GradientMaps g;
  double pitch_x = 0.0, pitch_y = 0.0;
  g.gx = load_grid(gx_path, pitch_x);
  g.gy = load_grid(gy_path, pitch_y);
  if (pitch_x != pitch_y) throw std::runtime_error("gradient grids disagree on pixel pitch");
  g.pixel_pitch = pitch_x;
  const HeightMap h = poisson_solve_dct(g);
  if (!height_out.empty()) save_grid(height_out, h.h, h.pixel_pitch);
  const double threshold = contact_threshold_above_median(h, config.contact_threshold);
  const OrientedPointCloud cloud = heightmap_to_cloud(h, g, threshold);
  if (cloud.empty()) {
    std::cerr << "no contact pixels above threshold\n";
    return 1;
  }
  save_ply(out_path, cloud);
  std::cout << cloud.size() << " contact points -> " << out_path << "\n";
  return 0;
}

int run_sample(const std::string& mesh_spec, int samples, std::uint64_t seed,
               const std::string& out_path) {
  const TriangleMesh mesh = resolve_mesh(mesh_spec);
  const OrientedPointCloud cloud = sample_mesh(mesh, samples, seed);
  save_ply(out_path, cloud);
  std::cout << cloud.size() << " samples -> " << out_path << "\n";
  return 0;
}

int run_scene(const std::string& mesh_spec, double fraction, double point_sigma_mm,
              std::uint64_t seed, const std::string& config_path,
              const std::string& prefix) {
  const PipelineConfig config = resolve_config(config_path);
  const TriangleMesh mesh = resolve_mesh(mesh_spec);
  NoiseSpec noise;
  noise.point_sigma = point_sigma_mm * 1e-3;
  const SyntheticScene scene =
      generate_scene(mesh, fraction, noise, seed, config.voxel_size);
  save_ply(prefix + "_target.ply", scene.target);
  save_ply(prefix + "_source.ply", scene.source);
  save_pose(prefix + "_gt.txt", scene.gt);
  std::cout << "scene " << seed << ": target " << scene.target.size() << " pts, source "
            << scene.source.size() << " pts -> " << prefix << "_{target,source,gt}\n";
  return 0;
}

int run_bench_recall(const std::string& mesh_spec, int trials, std::uint64_t seed,
                     double fraction, double point_sigma_mm, int threads,
                     const std::string& config_path, const std::string& out_path,
                     const std::string& curve_path) {
  const PipelineConfig config = resolve_config(config_path);
  const TriangleMesh mesh = resolve_mesh(mesh_spec);
  NoiseSpec noise;
  noise.point_sigma = point_sigma_mm * 1e-3;
  const std::vector<RegistrationMetrics> results =
      run_registration_trials(mesh, fraction, noise, trials, config, seed, threads);

  std::ofstream out = open_out(out_path);
  out << "trial,seed,re_deg,te_m,success\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    out << i << "," << seed + i << "," << fmt(results[i].re_deg) << ","
        << fmt(results[i].te) << "," << (results[i].success ? 1 : 0) << "\n";
  }

  if (!curve_path.empty()) {
    const std::vector<double> re_thresholds = {0.5, 1.0, 2.0, 5.0, 10.0, 30.0};
    const std::vector<double> te_thresholds = {0.5e-3, 1e-3, 2e-3, 5e-3, 10e-3, 30e-3};
    const RecallCurve curve = recall_curve(results, re_thresholds, te_thresholds);
    std::ofstream cout_file = open_out(curve_path);
    cout_file << "metric,threshold,recall\n";
    for (std::size_t i = 0; i < re_thresholds.size(); ++i) {
      cout_file << "re_deg," << fmt(curve.re_thresholds_deg[i]) << ","
                << fmt(curve.re_recall[i]) << "\n";
    }
    for (std::size_t i = 0; i < te_thresholds.size(); ++i) {
      cout_file << "te_m," << fmt(curve.te_thresholds[i]) << "," << fmt(curve.te_recall[i])
                << "\n";
    }
  }

  const long hits = std::count_if(results.begin(), results.end(),
                                  [](const RegistrationMetrics& m) { return m.success; });
  std::cout << hits << "/" << results.size() << " trials successful -> " << out_path
            << "\n";
  return 0;
}

std::vector<SyntheticScene> make_scenes(const TriangleMesh& mesh, int trials,
                                        std::uint64_t seed, double fraction,
                                        double point_sigma_mm, double voxel_size) {
  NoiseSpec noise;
  noise.point_sigma = point_sigma_mm * 1e-3;
  std::vector<SyntheticScene> scenes;
  scenes.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    scenes.push_back(generate_scene(mesh, fraction, noise, seed + i, voxel_size));
  }
  return scenes;
}

int run_bench_pruning(const std::string& mesh_spec, int trials, std::uint64_t seed,
                      double fraction, const std::vector<double>& alphas_deg,
                      const std::string& config_path, const std::string& out_path) {
  const PipelineConfig config = resolve_config(config_path);
  const TriangleMesh mesh = resolve_mesh(mesh_spec);
  const std::vector<SyntheticScene> scenes =
      make_scenes(mesh, trials, seed, fraction, 0.0, config.voxel_size);
  std::vector<double> alphas;
  for (double a : alphas_deg) alphas.push_back(a * kDeg);
  const std::vector<PruningRow> rows = run_pruning_study(scenes, alphas, config);
  std::ofstream out = open_out(out_path);
  out << "delta_alpha_deg,mean_edges,mean_cliques,mean_clique_ms\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << fmt(alphas_deg[i]) << "," << fmt(rows[i].mean_edges) << ","
        << fmt(rows[i].mean_cliques) << "," << fmt(rows[i].mean_clique_ms) << "\n";
  }
  std::cout << rows.size() << " rows -> " << out_path << "\n";
  return 0;
}

int run_bench_sweep(const std::string& mesh_spec, int trials, std::uint64_t seed,
                    double fraction, const std::vector<double>& dists_mm,
                    const std::vector<double>& alphas_deg, const std::string& config_path,
                    const std::string& out_path) {
  const PipelineConfig config = resolve_config(config_path);
  const TriangleMesh mesh = resolve_mesh(mesh_spec);
  const std::vector<SyntheticScene> scenes =
      make_scenes(mesh, trials, seed, fraction, 0.0, config.voxel_size);
  std::vector<double> dists, alphas;
  for (double d : dists_mm) dists.push_back(d * 1e-3);
  for (double a : alphas_deg) alphas.push_back(a * kDeg);
  const std::vector<ThresholdSweepRow> rows =
      run_threshold_sweep(scenes, dists, alphas, config);
  std::ofstream out = open_out(out_path);
  out << "delta_d_mm,delta_alpha_deg,mean_edges,mean_cliques,mean_clique_ms\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << fmt(dists_mm[i / alphas.size()]) << "," << fmt(alphas_deg[i % alphas.size()])
        << "," << fmt(rows[i].mean_edges) << "," << fmt(rows[i].mean_cliques) << ","
        << fmt(rows[i].mean_clique_ms) << "\n";
  }
  std::cout << rows.size() << " rows -> " << out_path << "\n";
  return 0;
}

int run_bench_sensitivity(const std::string& mesh_spec,
                          const std::vector<double>& lengths_mm,
                          const std::vector<std::string>& noise_specs, int trials,
                          std::uint64_t seed, int threads, const std::string& config_path,
                          const std::string& out_path) {
  const PipelineConfig config = resolve_config(config_path);
  const TriangleMesh mesh = resolve_mesh(mesh_spec);
  std::vector<double> lengths;
  for (double l : lengths_mm) lengths.push_back(l * 1e-3);
  std::vector<NoiseSpec> levels;
  for (const std::string& spec : noise_specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error("noise level must be trans_mm:rot_deg, got " + spec);
    }
    NoiseSpec n;
    n.ee_trans_sigma = std::stod(spec.substr(0, colon)) * 1e-3;
    n.ee_rot_sigma = std::stod(spec.substr(colon + 1)) * kDeg;
    levels.push_back(n);
  }
  const std::vector<SensitivityRow> rows =
      run_sensitivity_study(mesh, lengths, levels, trials, config, seed, threads);
  std::ofstream out = open_out(out_path);
  out << "sliding_length_mm,ee_trans_sigma_mm,ee_rot_sigma_deg,median_te_normalized,"
         "median_re_deg\n";
  for (const SensitivityRow& r : rows) {
    out << fmt(r.sliding_length * 1e3) << "," << fmt(r.noise.ee_trans_sigma * 1e3) << ","
        << fmt(r.noise.ee_rot_sigma / kDeg) << "," << fmt(r.median_te_normalized) << ","
        << fmt(r.median_re_deg) << "\n";
  }
  std::cout << rows.size() << " rows -> " << out_path << "\n";
  return 0;
}

int run_bench_profile(const std::string& mesh_spec, std::uint64_t seed, double fraction,
                      const std::string& config_path, const std::string& out_path) {
  const PipelineConfig config = resolve_config(config_path);
  const TriangleMesh mesh = resolve_mesh(mesh_spec);
  const SyntheticScene scene =
      generate_scene(mesh, fraction, NoiseSpec{}, seed, config.voxel_size);
  const RegistrationResult result = register_clouds(scene.source, scene.target, config);
  write_timings_csv(out_path, result.timings);

  const StageTimings& t = result.timings;
  const std::vector<std::pair<std::string, double>> stages = {
      {"downsample", t.downsample_ms}, {"keypoints", t.keypoints_ms},
      {"descriptors", t.descriptors_ms}, {"matching", t.matching_ms},
      {"graph", t.graph_ms},           {"cliques", t.cliques_ms},
      {"estimation", t.estimation_ms}, {"verification", t.verification_ms}};
  std::vector<std::pair<std::string, double>> ranked = stages;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::cout << "profile -> " << out_path << "\n";
  std::cout << "largest stages: " << ranked[0].first << " (" << ranked[0].second
            << " ms), " << ranked[1].first << " (" << ranked[1].second << " ms)\n";
  if (!result.success) {
    std::cerr << "note: registration failed on the profiled scene: "
              << result.failure_reason << "\n";
  }
  return 0;
}

int run_mesh(const std::string& name, bool all, bool list, const std::string& out_path,
             const std::string& out_dir) {
  if (list) {
    for (const std::string& n : procedural_mesh_names()) std::cout << n << "\n";
    return 0;
  }
  if (all) {
    if (out_dir.empty()) throw std::runtime_error("--all requires --out-dir");
    for (const std::string& n : procedural_mesh_names()) {
      const std::string path = out_dir + "/" + n + ".off";
      save_off(path, make_procedural_mesh(n));
      std::cout << path << "\n";
    }
    return 0;
  }
  if (name.empty() || out_path.empty()) {
    throw std::runtime_error("need --name and --out (or --all/--list)");
  }
  save_off(out_path, make_procedural_mesh(name));
  std::cout << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TacLoc: tactile partial-to-full registration and benchmarks"};
  app.require_subcommand(1);

  // -- register ---------------------------------------------------------
  std::string reg_source, reg_target, reg_config, reg_out, reg_hyp, reg_timings;
  CLI::App* reg = app.add_subcommand("register", "align a partial cloud to a model cloud");
  reg->add_option("--source", reg_source, "partial-view PLY")->required();
  reg->add_option("--target", reg_target, "full-model PLY")->required();
  reg->add_option("--config", reg_config, "pipeline config file");
  reg->add_option("--out", reg_out, "output pose path")->required();
  reg->add_option("--all-hypotheses", reg_hyp, "CSV of every scored hypothesis");
  reg->add_option("--timings", reg_timings, "CSV of per-stage wall time");

  // -- touch ------------------------------------------------------------
  std::vector<std::string> touch_gradients;
  std::string touch_config, touch_out, touch_height;
  CLI::App* touch = app.add_subcommand("touch", "contact cloud from tactile gradients");
  touch->add_option("--gradients", touch_gradients, "gx.grid gy.grid")
      ->expected(2)
      ->required();
  touch->add_option("--config", touch_config, "pipeline config file");
  touch->add_option("--out", touch_out, "output PLY")->required();
  touch->add_option("--save-height", touch_height, "also dump the solved height grid");

  // -- sample -----------------------------------------------------------
  std::string sample_mesh_spec, sample_out;
  int sample_count = 10000;
  std::uint64_t sample_seed = 0;
  CLI::App* sample = app.add_subcommand("sample", "area-weighted mesh surface sampling");
  sample->add_option("--mesh", sample_mesh_spec, "mesh file or procedural name")
      ->required();
  sample->add_option("--samples", sample_count, "sample count");
  sample->add_option("--seed", sample_seed, "RNG seed");
  sample->add_option("--out", sample_out, "output PLY")->required();

  // -- scene generate ----------------------------------------------------
  std::string scene_mesh, scene_config, scene_prefix;
  double scene_fraction = 0.1, scene_sigma_mm = 0.0;
  std::uint64_t scene_seed = 0;
  CLI::App* scene = app.add_subcommand("scene", "synthetic scene tools");
  CLI::App* scene_gen = scene->add_subcommand("generate", "one ground-truthed scene");
  scene_gen->add_option("--mesh", scene_mesh, "mesh file or procedural name")->required();
  scene_gen->add_option("--fraction", scene_fraction, "patch area fraction");
  scene_gen->add_option("--point-sigma", scene_sigma_mm, "point noise sigma [mm]");
  scene_gen->add_option("--seed", scene_seed, "RNG seed");
  scene_gen->add_option("--config", scene_config, "pipeline config file");
  scene_gen->add_option("--out", scene_prefix, "output path prefix")->required();
  scene->require_subcommand(1);

  // -- bench -------------------------------------------------------------
  CLI::App* bench = app.add_subcommand("bench", "benchmark studies");
  bench->require_subcommand(1);

  std::string recall_mesh = "blob_a", recall_config, recall_out, recall_curve_path;
  int recall_trials = 10, recall_threads = 1;
  std::uint64_t recall_seed = 1;
  double recall_fraction = 0.1, recall_sigma_mm = 0.0;
  CLI::App* recall = bench->add_subcommand("recall", "registration success study");
  recall->add_option("--mesh", recall_mesh, "mesh file or procedural name");
  recall->add_option("--trials", recall_trials, "scene count");
  recall->add_option("--seed", recall_seed, "base seed");
  recall->add_option("--fraction", recall_fraction, "patch area fraction");
  recall->add_option("--point-sigma", recall_sigma_mm, "point noise sigma [mm]");
  recall->add_option("--threads", recall_threads, "worker threads");
  recall->add_option("--config", recall_config, "pipeline config file");
  recall->add_option("--out", recall_out, "per-trial CSV")->required();
  recall->add_option("--curve", recall_curve_path, "recall-vs-threshold CSV");

  std::string pruning_mesh = "blob_a", pruning_config, pruning_out;
  int pruning_trials = 5;
  std::uint64_t pruning_seed = 1;
  double pruning_fraction = 0.1;
  std::vector<double> pruning_alphas = {180.0, 90.0, 30.0, 15.0};
  CLI::App* pruning = bench->add_subcommand("pruning", "edge/clique vs angle gate study");
  pruning->add_option("--mesh", pruning_mesh, "mesh file or procedural name");
  pruning->add_option("--trials", pruning_trials, "scene count");
  pruning->add_option("--seed", pruning_seed, "base seed");
  pruning->add_option("--fraction", pruning_fraction, "patch area fraction");
  pruning->add_option("--alphas", pruning_alphas, "angle gates [deg]");
  pruning->add_option("--config", pruning_config, "pipeline config file");
  pruning->add_option("--out", pruning_out, "CSV path")->required();

  std::string sweep_mesh = "blob_a", sweep_config, sweep_out;
  int sweep_trials = 5;
  std::uint64_t sweep_seed = 1;
  double sweep_fraction = 0.1;
  std::vector<double> sweep_dists = {2.0, 6.0, 12.0, 24.0};
  std::vector<double> sweep_alphas = {15.0, 30.0, 90.0, 180.0};
  CLI::App* sweep = bench->add_subcommand("sweep", "clique time vs both gates");
  sweep->add_option("--mesh", sweep_mesh, "mesh file or procedural name");
  sweep->add_option("--trials", sweep_trials, "scene count");
  sweep->add_option("--seed", sweep_seed, "base seed");
  sweep->add_option("--fraction", sweep_fraction, "patch area fraction");
  sweep->add_option("--dists", sweep_dists, "distance gates [mm]");
  sweep->add_option("--alphas", sweep_alphas, "angle gates [deg]");
  sweep->add_option("--config", sweep_config, "pipeline config file");
  sweep->add_option("--out", sweep_out, "CSV path")->required();

  // Asymmetric default: symmetric surfaces alias ground truth with their
  // symmetry twins and poison the medians.
  std::string sens_mesh = "blob_a", sens_config, sens_out;
  std::vector<double> sens_lengths = {6.0, 20.0, 60.0};
  std::vector<std::string> sens_noise = {"0:0", "0.5:0.5", "1.5:1.5"};
  int sens_trials = 5, sens_threads = 1;
  std::uint64_t sens_seed = 1;
  CLI::App* sens = bench->add_subcommand("sensitivity", "sliding length / pose noise study");
  sens->add_option("--mesh", sens_mesh, "mesh file or procedural name");
  sens->add_option("--lengths", sens_lengths, "sliding lengths [mm]");
  sens->add_option("--noise", sens_noise, "levels as trans_mm:rot_deg");
  sens->add_option("--trials", sens_trials, "trials per cell");
  sens->add_option("--seed", sens_seed, "base seed");
  sens->add_option("--threads", sens_threads, "worker threads");
  sens->add_option("--config", sens_config, "pipeline config file");
  sens->add_option("--out", sens_out, "CSV path")->required();

  std::string prof_mesh = "blob_a", prof_config, prof_out;
  std::uint64_t prof_seed = 1;
  double prof_fraction = 0.1;
  CLI::App* prof = bench->add_subcommand("profile", "per-stage wall time on one scene");
  prof->add_option("--mesh", prof_mesh, "mesh file or procedural name");
  prof->add_option("--seed", prof_seed, "scene seed");
  prof->add_option("--fraction", prof_fraction, "patch area fraction");
  prof->add_option("--config", prof_config, "pipeline config file");
  prof->add_option("--out", prof_out, "CSV path")->required();

  // -- mesh ----------------------------------------------------------------
  std::string mesh_name, mesh_out, mesh_out_dir;
  bool mesh_all = false, mesh_list = false;
  CLI::App* meshcmd = app.add_subcommand("mesh", "emit procedural meshes as OFF");
  meshcmd->add_option("--name", mesh_name, "procedural mesh name");
  meshcmd->add_option("--out", mesh_out, "output OFF path");
  meshcmd->add_option("--out-dir", mesh_out_dir, "directory for --all");
  meshcmd->add_flag("--all", mesh_all, "emit every procedural mesh");
  meshcmd->add_flag("--list", mesh_list, "print the procedural mesh names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*reg) {
      return run_register(reg_source, reg_target, reg_config, reg_out, reg_hyp,
                          reg_timings);
    }
    if (*touch) {
      return run_touch(touch_gradients[0], touch_gradients[1], touch_config, touch_out,
                       touch_height);
    }
    if (*sample) return run_sample(sample_mesh_spec, sample_count, sample_seed, sample_out);
    if (*scene_gen) {
      return run_scene(scene_mesh, scene_fraction, scene_sigma_mm, scene_seed,
                       scene_config, scene_prefix);
    }
    if (*recall) {
      return run_bench_recall(recall_mesh, recall_trials, recall_seed, recall_fraction,
                              recall_sigma_mm, recall_threads, recall_config, recall_out,
                              recall_curve_path);
    }
    if (*pruning) {
      return run_bench_pruning(pruning_mesh, pruning_trials, pruning_seed,
                               pruning_fraction, pruning_alphas, pruning_config,
                               pruning_out);
    }
    if (*sweep) {
      return run_bench_sweep(sweep_mesh, sweep_trials, sweep_seed, sweep_fraction,
                             sweep_dists, sweep_alphas, sweep_config, sweep_out);
    }
    if (*sens) {
      return run_bench_sensitivity(sens_mesh, sens_lengths, sens_noise, sens_trials,
                                   sens_seed, sens_threads, sens_config, sens_out);
    }
    if (*prof) {
      return run_bench_profile(prof_mesh, prof_seed, prof_fraction, prof_config, prof_out);
    }
    if (*meshcmd) return run_mesh(mesh_name, mesh_all, mesh_list, mesh_out, mesh_out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
