#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_set>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"
#include "medpu/metrics.hpp"
#include "medpu/parallel.hpp"
#include "medpu/spatial_index.hpp"

namespace medpu {

enum class RefineMode { none, mls, chamfer_oracle };

inline std::string to_string(RefineMode mode) {
  switch (mode) {
    case RefineMode::none: return "none";
    case RefineMode::mls: return "mls";
    case RefineMode::chamfer_oracle: return "chamfer-oracle";
  }
  return "none";
}

inline RefineMode refine_mode_from_string(const std::string& s) {
  if (s == "none") return RefineMode::none;
  if (s == "mls") return RefineMode::mls;
  if (s == "chamfer-oracle" || s == "chamfer_oracle") return RefineMode::chamfer_oracle;
  throw InvalidArgumentError("unknown refine mode: " + s);
}

// Densifier parameters; the refinement settings stand in for learned model
// weights. Chamfer step size is expressed in normalized (unit-sphere) units.
struct UpsampleConfig {
  int ratio = 16;
  int mls_k = 16;
  int mls_iterations = 3;
  RefineMode refine_mode = RefineMode::mls;
  int chamfer_steps = 50;
  double chamfer_step_size = 0.1;
};

// Per-stage provenance: parent[i] is the index, in that stage's input, of the
// point that spawned output point i.
struct StageProvenance {
  int ratio = 0;
  std::vector<int> parent;
};

struct UpsampleResult {
  PointCloud dense;
  std::vector<StageProvenance> stages;
  UpsampleConfig config_used;
};

namespace detail {

struct Vec3BitHash {
  std::size_t operator()(const Vec3& v) const {
    auto mix = [](std::uint64_t h, double d) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof(bits));
      h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    };
    return static_cast<std::size_t>(mix(mix(mix(0x12345678ULL, v.x), v.y), v.z));
  }
};

}  // namespace detail

// Emits each point followed by (ratio - 1) midpoints toward its nearest
// distinct neighbors in order of proximity. A midpoint that collides with an
// already-emitted point is nudged by 1e-7 along the neighbor direction so the
// output stays an exact ratio*N multiset. Optionally records each output
// point's parent input index.
inline PointCloud midpoint_interpolate(const PointCloud& sparse, int ratio,
                                       std::vector<int>* parents = nullptr) {
  if (ratio < 2) throw InvalidArgumentError("midpoint_interpolate: ratio must be >= 2");
  if (sparse.size() < 4 || sparse.size() < static_cast<std::size_t>(ratio)) {
    throw InvalidArgumentError("midpoint_interpolate: need at least max(4, ratio) points");
  }
  SpatialIndex index(sparse);
  int neighbors = ratio - 1;
  PointCloud out;
  out.points.reserve(sparse.size() * ratio);
  if (parents) {
    parents->clear();
    parents->reserve(sparse.size() * ratio);
  }
  std::unordered_set<Vec3, detail::Vec3BitHash> emitted;
  emitted.reserve(sparse.size() * ratio);
  auto emit_midpoint = [&](Vec3 p, int parent, const Vec3& dir) {
    while (!emitted.insert(p).second) {
      p += dir * 1e-7;
    }
    out.points.push_back(p);
    if (parents) parents->push_back(parent);
  };
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    const Vec3& p = sparse.points[i];
    // Originals pass through untouched; register them for collision checks.
    emitted.insert(p);
    out.points.push_back(p);
    if (parents) parents->push_back(static_cast<int>(i));
    // k+1 nearest contain at most one self entry, so this yields exactly
    // ratio-1 midpoints in proximity order.
    auto near = index.k_nearest(p, neighbors + 1);
    int produced = 0;
    for (const auto& nb : near) {
      if (static_cast<std::size_t>(nb.index) == i) continue;
      if (produced == neighbors) break;
      const Vec3& q = sparse.points[nb.index];
      Vec3 dir = normalized(q - p);
      if (dir == Vec3{0.0, 0.0, 0.0}) dir = {1.0, 0.0, 0.0};  // coincident input points
      emit_midpoint((p + q) * 0.5, static_cast<int>(i), dir);
      ++produced;
    }
  }
  return out;
}

namespace detail {

// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
// Returns eigenvalues ascending with matching unit eigenvector columns.
struct SymmetricEigen3 {
  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};
};

inline SymmetricEigen3 symmetric_eigen3(double a00, double a01, double a02, double a11,
                                        double a12, double a22) {
  double a[3][3] = {{a00, a01, a02}, {a01, a11, a12}, {a02, a12, a22}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off < 1e-30) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int r = 0; r < 3; ++r) {
          double arp = a[r][p], arq = a[r][q];
          a[r][p] = c * arp - s * arq;
          a[r][q] = s * arp + c * arq;
        }
        for (int r = 0; r < 3; ++r) {
          double apr = a[p][r], aqr = a[q][r];
          a[p][r] = c * apr - s * aqr;
          a[q][r] = s * apr + c * aqr;
        }
        for (int r = 0; r < 3; ++r) {
          double vrp = v[r][p], vrq = v[r][q];
          v[r][p] = c * vrp - s * vrq;
          v[r][q] = s * vrp + c * vrq;
        }
      }
    }
  }
  SymmetricEigen3 result;
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] < a[y][y]; });
  for (int i = 0; i < 3; ++i) {
    int src = order[i];
    result.values[i] = a[src][src];
    result.vectors[i] = {v[0][src], v[1][src], v[2][src]};
  }
  return result;
}

}  // namespace detail

struct MlsStats {
  int degenerate_neighborhoods = 0;  // rank-deficient fits left unmoved
};

// Iteratively projects each point onto the Gaussian-weighted least-squares
// plane of its k nearest reference points. The bandwidth is the mean
// nearest-neighbor spacing measured inside the neighborhood, which keeps the
// fit local on curved surfaces instead of averaging across them. A fixed
// iteration count is run with no convergence test. Rank-deficient
// neighborhoods leave the point unmoved and are tallied.
inline PointCloud mls_project(const PointCloud& points, const PointCloud& reference, int k,
                              int iterations, MlsStats* stats = nullptr) {
  if (k < 6) throw InvalidArgumentError("mls_project: k must be >= 6");
  if (reference.size() < static_cast<std::size_t>(k)) {
    throw InvalidArgumentError("mls_project: k exceeds reference size");
  }
  if (iterations < 0) throw InvalidArgumentError("mls_project: negative iteration count");
  SpatialIndex index(reference);
  PointCloud out = points;
  std::vector<int> degenerate(points.size(), 0);
  for (int iter = 0; iter < iterations; ++iter) {
    parallel_for(out.size(), [&](std::size_t i) {
      Vec3 p = out.points[i];
      auto near = index.k_nearest(p, k);
      // Local sample spacing: median over neighbors of the distance to their
      // closest other neighbor. The median shrugs off near-duplicate pairs.
      std::vector<double> gaps(near.size());
      for (std::size_t a = 0; a < near.size(); ++a) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < near.size(); ++b) {
          if (a == b) continue;
          best = std::min(best, squared_distance(reference.points[near[a].index],
                                                 reference.points[near[b].index]));
        }
        gaps[a] = std::sqrt(best);
      }
      std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
      double spacing = gaps[gaps.size() / 2];
      if (spacing == 0.0) {
        degenerate[i] = 1;
        return;
      }
      double inv_h2 = 1.0 / (spacing * spacing);
      double wsum = 0.0;
      Vec3 c{0.0, 0.0, 0.0};
      for (const auto& nb : near) {
        double w = std::exp(-nb.dist * nb.dist * inv_h2);
        wsum += w;
        c += reference.points[nb.index] * w;
      }
      // All weights can underflow when the point sits far outside a tightly
      // clustered neighborhood; leave it unmoved rather than divide by zero.
      if (!(wsum > 0.0)) {
        degenerate[i] = 1;
        return;
      }
      c = c / wsum;
      double a00 = 0, a01 = 0, a02 = 0, a11 = 0, a12 = 0, a22 = 0;
      for (const auto& nb : near) {
        double w = std::exp(-nb.dist * nb.dist * inv_h2);
        Vec3 d = reference.points[nb.index] - c;
        a00 += w * d.x * d.x;
        a01 += w * d.x * d.y;
        a02 += w * d.x * d.z;
        a11 += w * d.y * d.y;
        a12 += w * d.y * d.z;
        a22 += w * d.z * d.z;
      }
      auto eig = detail::symmetric_eigen3(a00 / wsum, a01 / wsum, a02 / wsum, a11 / wsum,
                                          a12 / wsum, a22 / wsum);
      // Collinear (or coincident) neighborhoods have no unique plane normal.
      if (eig.values[1] <= 1e-12 * std::max(eig.values[2], 1e-300)) {
        degenerate[i] = 1;
        return;
      }
      Vec3 n = normalized(eig.vectors[0]);
      out.points[i] = p - n * dot(n, p - c);
    });
  }
  if (stats) {
    stats->degenerate_neighborhoods = 0;
    for (int d : degenerate) stats->degenerate_neighborhoods += d;
  }
  out.normals.clear();  // projected positions invalidate carried normals
  return out;
}

// Gradient descent on the pred-to-target Chamfer term: each step moves every
// point by -step_size * 2 (p - nn_target(p)), with the step size decaying by
// x0.95. Steps that would raise the symmetric Chamfer distance are discarded,
// so CD(points, target) never increases over the run.
inline PointCloud chamfer_gradient_refine(const PointCloud& points, const PointCloud& target,
                                          int steps, double step_size) {
  if (points.empty() || target.empty()) {
    throw EmptyInputError("chamfer_gradient_refine: empty point cloud");
  }
  if (!(step_size > 0.0)) throw InvalidArgumentError("chamfer_gradient_refine: step size must be > 0");
  SpatialIndex target_index(target);
  PointCloud current = points;
  current.normals.clear();
  double current_cd = chamfer_distance(current, target);
  double s = step_size;
  for (int step = 0; step < steps; ++step) {
    PointCloud proposal = current;
    parallel_for(proposal.size(), [&](std::size_t i) {
      const Vec3& p = current.points[i];
      const Vec3& q = target.points[target_index.nearest(p).index];
      proposal.points[i] = p - (p - q) * (2.0 * s);
    });
    double proposal_cd = chamfer_distance(proposal, target);
    if (proposal_cd <= current_cd) {
      current = std::move(proposal);
      current_cd = proposal_cd;
    }
    s *= 0.95;
  }
  return current;
}

// Ratio-r upsampling in stages of at most 4x (16x runs as two 4x passes).
// Each stage densifies by midpoint interpolation and then refines per the
// configured mode: mls projects onto the stage input as the surface proxy,
// chamfer-oracle descends toward the provided reference cloud.
inline UpsampleResult upsample(const PointCloud& sparse, const UpsampleConfig& config,
                               const PointCloud* reference = nullptr) {
  if (config.ratio < 2) throw InvalidArgumentError("upsample: ratio must be >= 2");
  if (config.refine_mode == RefineMode::chamfer_oracle && reference == nullptr) {
    throw InvalidArgumentError("upsample: chamfer-oracle mode requires a reference cloud");
  }
  std::vector<int> stage_ratios;
  int r = config.ratio;
  while (r > 4) {
    if (r % 4 != 0) throw InvalidArgumentError("upsample: ratio must factor into stages of <= 4");
    stage_ratios.push_back(4);
    r /= 4;
  }
  stage_ratios.push_back(r);

  UpsampleResult result;
  result.config_used = config;
  PointCloud current = sparse;
  current.normals.clear();
  for (int stage_ratio : stage_ratios) {
    StageProvenance stage;
    stage.ratio = stage_ratio;
    PointCloud dense = midpoint_interpolate(current, stage_ratio, &stage.parent);
    switch (config.refine_mode) {
      case RefineMode::none:
        break;
      case RefineMode::mls:
        dense = mls_project(dense, current, config.mls_k, config.mls_iterations);
        break;
      case RefineMode::chamfer_oracle:
        dense = chamfer_gradient_refine(dense, *reference, config.chamfer_steps,
                                        config.chamfer_step_size);
        break;
    }
    result.stages.push_back(std::move(stage));
    current = std::move(dense);
  }
  result.dense = std::move(current);
  return result;
}

}  // namespace medpu
