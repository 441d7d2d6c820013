// medpu command line: mask -> point cloud -> upsample -> mesh -> metrics,
// runnable end to end or one stage at a time.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medpu/medpu.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace medpu;

namespace {

// Exit codes: 0 success, 2 I/O or format, 3 empty or degenerate input,
// 4 invalid argument.
constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitInvalid = 4;

// FNV-1a digest of a file's bytes, for manifests and rerun comparison.
std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for digest: " + path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

json config_to_json(const PipelineConfig& c) {
  return json{{"voxel_size", c.voxel_size},
              {"ratio", c.ratio},
              {"input_cap", c.input_cap},
              {"sample_count", c.sample_count},
              {"seed", c.seed},
              {"refine_mode", to_string(c.refine_mode)},
              {"mls_k", c.mls_k},
              {"mls_iterations", c.mls_iterations},
              {"chamfer_steps", c.chamfer_steps},
              {"chamfer_step_size", c.chamfer_step_size},
              {"tau", c.tau},
              {"edge_angle_deg", c.edge_angle_deg},
              {"smoothing_radius", c.smoothing_radius},
              {"iso", c.iso},
              {"expected_cc", c.expected_cc},
              {"max_grid_cells", c.max_grid_cells}};
}

void print_report(const MetricReport& report) {
  std::cout << std::left << std::setw(10) << "metric" << "value\n";
  for (const auto& [metric, value] : report.values) {
    std::cout << std::left << std::setw(10) << metric;
    if (std::isfinite(value)) {
      std::cout << std::setprecision(6) << value;
    } else {
      std::cout << "n/a";
    }
    std::cout << "\n";
  }
}

void write_report(const fs::path& path, const std::string& case_name,
                  const MetricReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open report for writing: " + path.string());
  write_report_csv(out, {{case_name, report}});
  if (!out) throw IoError("report write failed: " + path.string());
}

struct StageTimer {
  std::vector<std::pair<std::string, double>> stages;
  std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
  void mark(const std::string& name) {
    auto now = std::chrono::steady_clock::now();
    stages.emplace_back(name, std::chrono::duration<double, std::milli>(now - last).count());
    last = now;
  }
};

int cmd_extract(const std::string& mask_path, const std::string& out_path) {
  VoxelMask mask = load_mask(mask_path);
  PointCloud cloud = mask_to_surface_points(mask);
  save_cloud(cloud, out_path);
  std::cout << cloud.size() << " surface points -> " << out_path << "\n";
  return kExitOk;
}

int cmd_upsample(const std::string& in_path, const std::string& out_path,
                 const PipelineConfig& config, const std::string& reference_path) {
  validate(config);
  PointCloud cloud = load_cloud(in_path);
  if (cloud.empty()) throw EmptyInputError("upsample: input cloud is empty");
  if (cloud.size() > static_cast<std::size_t>(config.input_cap)) {
    cloud = farthest_point_sample(cloud, config.input_cap, config.seed);
  }
  PointCloud reference;
  const PointCloud* reference_ptr = nullptr;
  if (!reference_path.empty()) {
    reference = load_cloud(reference_path);
    reference_ptr = &reference;
  }
  UpsampleResult result = upsample(cloud, config.upsample_config(), reference_ptr);
  save_cloud(result.dense, out_path);
  std::cout << cloud.size() << " -> " << result.dense.size() << " points (" << config.ratio
            << "x, " << to_string(config.refine_mode) << ") -> " << out_path << "\n";
  return kExitOk;
}

int cmd_reconstruct(const std::string& in_path, const std::string& out_path,
                    const PipelineConfig& config) {
  validate(config);
  PointCloud cloud = load_cloud(in_path);
  if (cloud.empty()) throw EmptyInputError("reconstruct: input cloud is empty");
  TriangleMesh mesh = reconstruct_mesh(cloud, config.voxel_size, config.smoothing_radius,
                                       config.iso, config.max_grid_cells);
  save_mesh(mesh, out_path);
  std::cout << mesh.vertex_count() << " vertices, " << mesh.face_count() << " faces -> "
            << out_path << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path,
                 const std::string& report_path, const PipelineConfig& config) {
  validate(config);
  TriangleMesh pred = load_mesh(pred_path);
  TriangleMesh gt = load_mesh(gt_path);
  MetricReport report = evaluate_pair(pred, gt, config.evaluate_options());
  write_report(report_path, fs::path(pred_path).stem().string(), report);
  print_report(report);
  std::cout << "report -> " << report_path << "\n";
  return kExitOk;
}

int cmd_pipeline(const std::string& mask_path, const std::string& gt_path,
                 const std::string& out_dir, const PipelineConfig& config) {
  validate(config);
  fs::create_directories(out_dir);
  StageTimer timer;
  VoxelMask mask = load_mask(mask_path);
  TriangleMesh gt = load_mesh(gt_path);
  timer.mark("load");

  PipelineArtifacts artifacts = run_pipeline(mask, gt, config);
  timer.mark("pipeline");

  fs::path dir(out_dir);
  save_cloud(artifacts.extracted, dir / "01_extracted.xyz");
  save_cloud(artifacts.normalized, dir / "02_normalized.xyz");
  save_cloud(artifacts.dense, dir / "03_dense.xyz");
  save_cloud(artifacts.dense_world, dir / "04_dense_world.xyz");
  save_mesh(artifacts.mesh, dir / "05_mesh.obj");
  write_report(dir / "06_report.csv", fs::path(mask_path).stem().string(), artifacts.report);
  timer.mark("write");

  json manifest;
  manifest["tool"] = std::string("medpu ") + kVersion;
  manifest["config"] = config_to_json(config);
  manifest["inputs"] = {{"mask", {{"path", mask_path}, {"digest", file_digest(mask_path)}}},
                        {"reference", {{"path", gt_path}, {"digest", file_digest(gt_path)}}}};
  json artifact_digests;
  for (const char* name : {"01_extracted.xyz", "02_normalized.xyz", "03_dense.xyz",
                           "04_dense_world.xyz", "05_mesh.obj", "06_report.csv"}) {
    artifact_digests[name] = file_digest(dir / name);
  }
  manifest["artifacts"] = artifact_digests;
  json timings;
  for (const auto& [name, ms] : timer.stages) timings[name] = ms;
  manifest["wall_ms"] = timings;
  std::ofstream mout(dir / "run_manifest.json", std::ios::binary);
  mout << manifest.dump(2) << "\n";
  if (!mout) throw IoError("manifest write failed");

  print_report(artifacts.report);
  std::cout << "artifacts -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_make_dataset(const std::string& mesh_dir, const std::string& out_dir,
                     int pairs_per_mesh, int sparse_n, int ratio, std::uint64_t seed) {
  if (ratio != 2 && ratio != 4 && ratio != 16) {
    throw InvalidArgumentError("make-dataset: ratio must be one of {2,4,16}");
  }
  std::vector<fs::path> mesh_files;
  if (!fs::is_directory(mesh_dir)) throw IoError("not a directory: " + mesh_dir);
  for (const auto& entry : fs::directory_iterator(mesh_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    if (ext == ".obj" || ext == ".ply") mesh_files.push_back(entry.path());
  }
  std::sort(mesh_files.begin(), mesh_files.end());
  if (mesh_files.empty()) throw EmptyInputError("make-dataset: no .obj/.ply meshes found");

  fs::path pairs_dir = fs::path(out_dir) / "pairs";
  fs::create_directories(pairs_dir);

  // Meshes are independent cases: extract them concurrently, then emit the
  // manifest serially in sorted mesh order so the output is deterministic.
  std::vector<std::vector<PatchPair>> per_mesh(mesh_files.size());
  std::vector<std::exception_ptr> errors(mesh_files.size());
  parallel_for(
      mesh_files.size(),
      [&](std::size_t m) {
        try {
          TriangleMesh mesh = load_mesh(mesh_files[m]);
          per_mesh[m] = extract_patch_pairs(mesh, pairs_per_mesh, sparse_n, ratio,
                                            derive_seed(seed, m), mesh_files[m].stem().string());
        } catch (...) {
          errors[m] = std::current_exception();
        }
      },
      1);
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  std::ofstream manifest(fs::path(out_dir) / "manifest.csv", std::ios::binary);
  if (!manifest) throw IoError("cannot open manifest for writing");
  manifest << "source_id,seed,ratio,sparse_n\n";
  std::size_t total = 0;
  for (std::size_t m = 0; m < mesh_files.size(); ++m) {
    for (const auto& pair : per_mesh[m]) {
      save_xyz(pair.sparse, pairs_dir / (pair.source_id + "_sparse.xyz"));
      save_xyz(pair.dense, pairs_dir / (pair.source_id + "_dense.xyz"));
      manifest << pair.source_id << ',' << derive_seed(seed, m) << ',' << ratio << ','
               << sparse_n << "\n";
      ++total;
    }
  }
  if (!manifest) throw IoError("manifest write failed");
  std::cout << total << " pairs from " << mesh_files.size() << " meshes -> " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medpu: point cloud upsampling and mesh evaluation pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  PipelineConfig flags;  // values set by flags override the config file
  std::string mode_name = "mls";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value configuration file");
    cmd->add_option("--seed", flags.seed, "random seed");
  };

  // extract
  std::string mask_path, cloud_out;
  CLI::App* extract = app.add_subcommand("extract", "mask -> surface point cloud");
  extract->add_option("mask", mask_path, "VMSK1 mask file")->required();
  extract->add_option("output", cloud_out, "output cloud (.xyz/.ply)")->required();

  // upsample
  std::string up_in, up_out, reference_path;
  CLI::App* upsample_cmd = app.add_subcommand("upsample", "densify a point cloud");
  upsample_cmd->add_option("input", up_in, "input cloud")->required();
  upsample_cmd->add_option("output", up_out, "output cloud")->required();
  upsample_cmd->add_option("--ratio", flags.ratio, "upsampling ratio {2,4,16}");
  upsample_cmd->add_option("--mode", mode_name, "refinement: none|mls|chamfer-oracle");
  upsample_cmd->add_option("--reference", reference_path,
                           "reference cloud for chamfer-oracle mode");
  upsample_cmd->add_option("--input-cap", flags.input_cap,
                           "max input points before FPS capping");
  add_common(upsample_cmd);

  // reconstruct
  std::string rec_in, rec_out;
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "point cloud -> mesh");
  reconstruct->add_option("input", rec_in, "input cloud")->required();
  reconstruct->add_option("output", rec_out, "output mesh (.obj/.ply)")->required();
  reconstruct->add_option("--voxel-size", flags.voxel_size, "voxel size in model units");
  reconstruct->add_option("--smoothing-radius", flags.smoothing_radius,
                          "occupancy box-filter radius");
  reconstruct->add_option("--iso", flags.iso, "isovalue for surface extraction");
  add_common(reconstruct);

  // evaluate
  std::string pred_path, gt_path, report_path;
  CLI::App* evaluate = app.add_subcommand("evaluate", "mesh-vs-mesh metric report");
  evaluate->add_option("pred", pred_path, "predicted mesh")->required();
  evaluate->add_option("reference", gt_path, "reference mesh")->required();
  evaluate->add_option("report", report_path, "output CSV")->required();
  evaluate->add_option("--sample-count", flags.sample_count, "evaluation samples per mesh");
  evaluate->add_option("--tau", flags.tau, "F-score threshold (normalized units)");
  evaluate->add_option("--edge-angle", flags.edge_angle_deg, "edge detection angle, degrees");
  evaluate->add_option("--expected-cc", flags.expected_cc,
                       "expected component count (0: reference's own)");
  add_common(evaluate);

  // pipeline
  std::string pipe_mask, pipe_gt, out_dir;
  CLI::App* pipeline = app.add_subcommand("pipeline", "full mask -> mesh -> report run");
  pipeline->add_option("mask", pipe_mask, "VMSK1 mask file")->required();
  pipeline->add_option("reference", pipe_gt, "reference mesh")->required();
  pipeline->add_option("--out", out_dir, "output directory")->required();
  pipeline->add_option("--voxel-size", flags.voxel_size, "voxel size in model units");
  pipeline->add_option("--ratio", flags.ratio, "upsampling ratio {2,4,16}");
  pipeline->add_option("--mode", mode_name, "refinement: none|mls|chamfer-oracle");
  pipeline->add_option("--sample-count", flags.sample_count, "evaluation samples per mesh");
  pipeline->add_option("--tau", flags.tau, "F-score threshold (normalized units)");
  pipeline->add_option("--edge-angle", flags.edge_angle_deg, "edge detection angle, degrees");
  pipeline->add_option("--expected-cc", flags.expected_cc, "expected component count");
  pipeline->add_option("--smoothing-radius", flags.smoothing_radius,
                       "occupancy box-filter radius");
  pipeline->add_option("--iso", flags.iso, "isovalue for surface extraction");
  pipeline->add_option("--input-cap", flags.input_cap, "max input points before FPS capping");
  add_common(pipeline);

  // make-dataset
  std::string dataset_mesh_dir, dataset_out;
  int pairs_per_mesh = 16, sparse_n = 256, dataset_ratio = 4;
  std::uint64_t dataset_seed = 0;
  CLI::App* make_dataset = app.add_subcommand("make-dataset",
                                              "cut sparse/dense patch pairs from meshes");
  make_dataset->add_option("mesh_dir", dataset_mesh_dir, "directory of .obj/.ply meshes")
      ->required();
  make_dataset->add_option("--out", dataset_out, "output directory")->required();
  make_dataset->add_option("--pairs-per-mesh", pairs_per_mesh, "patch pairs per mesh");
  make_dataset->add_option("--sparse-n", sparse_n, "sparse point count per pair");
  make_dataset->add_option("--ratio", dataset_ratio, "dense/sparse ratio {2,4,16}");
  make_dataset->add_option("--seed", dataset_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    PipelineConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    // Flags override: re-parse flag values on top of the file config.
    auto apply_flag = [&](const CLI::Option* opt, auto member) {
      if (opt && opt->count() > 0) config.*member = flags.*member;
    };
    if (CLI::App* sub = app.get_subcommands().front(); sub != nullptr) {
      apply_flag(sub->get_option_no_throw("--voxel-size"), &PipelineConfig::voxel_size);
      apply_flag(sub->get_option_no_throw("--ratio"), &PipelineConfig::ratio);
      apply_flag(sub->get_option_no_throw("--seed"), &PipelineConfig::seed);
      apply_flag(sub->get_option_no_throw("--sample-count"), &PipelineConfig::sample_count);
      apply_flag(sub->get_option_no_throw("--tau"), &PipelineConfig::tau);
      apply_flag(sub->get_option_no_throw("--edge-angle"), &PipelineConfig::edge_angle_deg);
      apply_flag(sub->get_option_no_throw("--expected-cc"), &PipelineConfig::expected_cc);
      apply_flag(sub->get_option_no_throw("--smoothing-radius"),
                 &PipelineConfig::smoothing_radius);
      apply_flag(sub->get_option_no_throw("--iso"), &PipelineConfig::iso);
      apply_flag(sub->get_option_no_throw("--input-cap"), &PipelineConfig::input_cap);
      const CLI::Option* mode_opt = sub->get_option_no_throw("--mode");
      if (mode_opt && mode_opt->count() > 0) {
        config.refine_mode = refine_mode_from_string(mode_name);
      }
    }

    if (extract->parsed()) return cmd_extract(mask_path, cloud_out);
    if (upsample_cmd->parsed()) return cmd_upsample(up_in, up_out, config, reference_path);
    if (reconstruct->parsed()) return cmd_reconstruct(rec_in, rec_out, config);
    if (evaluate->parsed()) return cmd_evaluate(pred_path, gt_path, report_path, config);
    if (pipeline->parsed()) return cmd_pipeline(pipe_mask, pipe_gt, out_dir, config);
    if (make_dataset->parsed()) {
      return cmd_make_dataset(dataset_mesh_dir, dataset_out, pairs_per_mesh, sparse_n,
                              dataset_ratio, dataset_seed);
    }
    std::cerr << "no subcommand\n";
    return kExitInvalid;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const EmptyInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
