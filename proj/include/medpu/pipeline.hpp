#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"
#include "medpu/marching_cubes.hpp"
#include "medpu/metrics.hpp"
#include "medpu/sampling.hpp"
#include "medpu/upsample.hpp"
#include "medpu/voxel.hpp"

namespace medpu {

// End-to-end settings: mask -> surface points -> normalize -> upsample ->
// reconstruct -> evaluate. Defaults follow the operating point the library is
// tuned for (16x upsampling, 65,536-point input cap, 1.5-unit voxels,
// 16,384-sample evaluation).
struct PipelineConfig {
  double voxel_size = 1.5;
  int ratio = 16;
  int input_cap = 65536;
  int sample_count = 16384;
  std::uint64_t seed = 0;
  RefineMode refine_mode = RefineMode::mls;
  int mls_k = 16;
  int mls_iterations = 3;
  int chamfer_steps = 50;
  double chamfer_step_size = 0.1;
  double tau = kDefaultTau;
  double edge_angle_deg = kDefaultEdgeAngleDeg;
  int smoothing_radius = 1;
  double iso = 0.25;
  int expected_cc = 0;  // 0: derive from the reference mesh
  std::size_t max_grid_cells = kDefaultMaxGridCells;

  UpsampleConfig upsample_config() const {
    UpsampleConfig cfg;
    cfg.ratio = ratio;
    cfg.mls_k = mls_k;
    cfg.mls_iterations = mls_iterations;
    cfg.refine_mode = refine_mode;
    cfg.chamfer_steps = chamfer_steps;
    cfg.chamfer_step_size = chamfer_step_size;
    return cfg;
  }
  EvaluateOptions evaluate_options() const {
    EvaluateOptions opts;
    opts.sample_count = sample_count;
    opts.seed = seed;
    opts.tau = tau;
    opts.edge_angle_deg = edge_angle_deg;
    opts.expected_cc = expected_cc;
    return opts;
  }
};

inline void validate(const PipelineConfig& c) {
  if (!(c.voxel_size > 0.0)) throw InvalidArgumentError("config: voxel_size must be > 0");
  if (c.ratio != 2 && c.ratio != 4 && c.ratio != 16) {
    throw InvalidArgumentError("config: ratio must be one of {2,4,16}");
  }
  if (c.input_cap < 4) throw InvalidArgumentError("config: input_cap must be >= 4");
  if (c.sample_count < 1) throw InvalidArgumentError("config: sample_count must be >= 1");
  if (c.mls_k < 6) throw InvalidArgumentError("config: mls_k must be >= 6");
  if (c.mls_iterations < 0) throw InvalidArgumentError("config: mls_iterations must be >= 0");
  if (c.chamfer_steps < 0) throw InvalidArgumentError("config: chamfer_steps must be >= 0");
  if (!(c.chamfer_step_size > 0.0)) {
    throw InvalidArgumentError("config: chamfer_step_size must be > 0");
  }
  if (!(c.tau > 0.0)) throw InvalidArgumentError("config: tau must be > 0");
  if (c.smoothing_radius < 0) throw InvalidArgumentError("config: smoothing_radius must be >= 0");
  if (c.expected_cc < 0) throw InvalidArgumentError("config: expected_cc must be >= 0");
}

// Flat "key = value" configuration text; '#' starts a comment. Unknown keys
// are rejected so typos cannot silently fall back to defaults.
inline PipelineConfig parse_config_text(std::istream& in, PipelineConfig base = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgumentError("config: missing '=' at line " + std::to_string(line_no));
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InvalidArgumentError("config: empty key or value at line " + std::to_string(line_no));
    }
    try {
      if (key == "voxel_size") base.voxel_size = std::stod(value);
      else if (key == "ratio") base.ratio = std::stoi(value);
      else if (key == "input_cap") base.input_cap = std::stoi(value);
      else if (key == "sample_count") base.sample_count = std::stoi(value);
      else if (key == "seed") base.seed = std::stoull(value);
      else if (key == "refine_mode") base.refine_mode = refine_mode_from_string(value);
      else if (key == "mls_k") base.mls_k = std::stoi(value);
      else if (key == "mls_iterations") base.mls_iterations = std::stoi(value);
      else if (key == "chamfer_steps") base.chamfer_steps = std::stoi(value);
      else if (key == "chamfer_step_size") base.chamfer_step_size = std::stod(value);
      else if (key == "tau") base.tau = std::stod(value);
      else if (key == "edge_angle_deg") base.edge_angle_deg = std::stod(value);
      else if (key == "smoothing_radius") base.smoothing_radius = std::stoi(value);
      else if (key == "iso") base.iso = std::stod(value);
      else if (key == "expected_cc") base.expected_cc = std::stoi(value);
      else if (key == "max_grid_cells") base.max_grid_cells = std::stoull(value);
      else throw InvalidArgumentError("config: unknown key '" + key + "'");
    } catch (const InvalidArgumentError&) {
      throw;
    } catch (...) {
      throw InvalidArgumentError("config: bad value for '" + key + "' at line " +
                                 std::to_string(line_no));
    }
  }
  return base;
}

inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  return parse_config_text(in, base);
}

// Voxelize a point cloud and extract the isosurface of its box-smoothed
// occupancy. This is the meshing half of the pipeline, also exposed on its
// own for reconstructing raw clouds.
inline TriangleMesh reconstruct_mesh(const PointCloud& cloud, double voxel_size,
                                     int smoothing_radius = 1, double iso = 0.25,
                                     std::size_t max_grid_cells = kDefaultMaxGridCells) {
  VoxelMask occupancy = points_to_occupancy(cloud, voxel_size, max_grid_cells);
  ScalarGrid grid = occupancy_to_scalar(occupancy, smoothing_radius);
  return marching_cubes(grid, iso);
}

// All intermediate products of one pipeline run, in the order produced.
struct PipelineArtifacts {
  PointCloud extracted;        // surface voxel centers, world units
  PointCloud normalized;       // extracted (capped) in the unit-sphere frame
  NormalizationTransform transform;
  PointCloud dense;            // upsampled, unit-sphere frame
  PointCloud dense_world;      // upsampled, world units
  TriangleMesh mesh;           // reconstructed, world units
  MetricReport report;
};

// Full run against a reference mesh: extract -> normalize -> (cap) ->
// upsample -> denormalize -> reconstruct -> evaluate.
inline PipelineArtifacts run_pipeline(const VoxelMask& mask, const TriangleMesh& reference,
                                      const PipelineConfig& config) {
  validate(config);
  PipelineArtifacts artifacts;
  artifacts.extracted = mask_to_surface_points(mask);

  PointCloud capped = artifacts.extracted;
  if (capped.size() > static_cast<std::size_t>(config.input_cap)) {
    capped = farthest_point_sample(capped, config.input_cap, config.seed);
  }
  auto [normalized, transform] = normalize_to_unit_sphere(capped);
  artifacts.normalized = std::move(normalized);
  artifacts.transform = transform;

  const PointCloud* oracle = nullptr;
  PointCloud oracle_cloud;
  if (config.refine_mode == RefineMode::chamfer_oracle) {
    oracle_cloud = poisson_disk_sample(reference, config.sample_count,
                                       derive_seed(config.seed, 21));
    oracle_cloud = transform.apply(oracle_cloud);
    oracle = &oracle_cloud;
  }
  artifacts.dense = upsample(artifacts.normalized, config.upsample_config(), oracle).dense;
  artifacts.dense_world = transform.invert(artifacts.dense);

  artifacts.mesh = reconstruct_mesh(artifacts.dense_world, config.voxel_size,
                                    config.smoothing_radius, config.iso, config.max_grid_cells);
  artifacts.report = evaluate_pair(artifacts.mesh, reference, config.evaluate_options());
  return artifacts;
}

}  // namespace medpu
