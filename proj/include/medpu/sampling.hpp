#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"
#include "medpu/rng.hpp"
#include "medpu/spatial_index.hpp"

namespace medpu {

// Sparse/dense training pair cut from one mesh patch. Both clouds share one
// unit-sphere normalization; the sparse points are a subset of the dense.
struct PatchPair {
  PointCloud sparse;
  PointCloud dense;
  std::string source_id;
  Point3 seed_point;  // patch center on the original surface
};

// Uniform area-weighted surface sampling with per-point face normals.
// Deterministic per seed.
inline PointCloud sample_surface_uniform(const TriangleMesh& mesh, int count,
                                         std::uint64_t seed) {
  if (count < 1) throw InvalidArgumentError("sample_surface_uniform: count must be >= 1");
  if (mesh.faces.empty()) throw DegenerateInputError("sample_surface_uniform: mesh has no faces");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += triangle_area(mesh, static_cast<int>(f));
    cumulative[f] = total;
  }
  if (total <= 0.0) throw DegenerateInputError("sample_surface_uniform: zero total area");

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(count);
  cloud.normals.reserve(count);
  for (int s = 0; s < count; ++s) {
    double r = rng.uniform() * total;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), r);
    std::size_t f = std::min<std::size_t>(it - cumulative.begin(), mesh.faces.size() - 1);
    const auto& face = mesh.faces[f];
    const Vec3& a = mesh.vertices[face[0]];
    const Vec3& b = mesh.vertices[face[1]];
    const Vec3& c = mesh.vertices[face[2]];
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {  // fold into the triangle
      u = 1.0 - u;
      v = 1.0 - v;
    }
    cloud.points.push_back(a + (b - a) * u + (c - a) * v);
    cloud.normals.push_back(face_normal(mesh, static_cast<int>(f)));
  }
  return cloud;
}

// Hexagonal-packing radius estimate for `count` samples on area `area`.
inline double poisson_radius_estimate(double area, int count) {
  return std::sqrt(area / (2.0 * std::sqrt(3.0) * static_cast<double>(count)));
}

// Greedy weighted sample elimination: repeatedly removes the highest-weighted
// candidate, where a candidate's weight is the sum over neighbors within
// r_max of (1 - d/r_max)^8, until target_count remain. Survivors keep their
// original order. Requesting every candidate returns the input unchanged.
inline PointCloud weighted_sample_elimination(const PointCloud& candidates, int target_count,
                                              double r_max) {
  if (target_count < 1) {
    throw InvalidArgumentError("weighted_sample_elimination: target must be >= 1");
  }
  if (static_cast<std::size_t>(target_count) > candidates.size()) {
    throw InvalidArgumentError("weighted_sample_elimination: target exceeds candidate count");
  }
  std::size_t n = candidates.size();
  if (static_cast<std::size_t>(target_count) == n) return candidates;

  SpatialIndex index(candidates);
  std::vector<std::vector<Neighbor>> neighbors(n);
  std::vector<double> weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto near = index.radius_query(candidates.points[i], r_max);
    for (const auto& nb : near) {
      if (static_cast<std::size_t>(nb.index) == i) continue;
      neighbors[i].push_back(nb);
      double w = 1.0 - nb.dist / r_max;
      weight[i] += w * w * w * w * w * w * w * w;
    }
  }

  // Max-heap with lazy invalidation; stale entries are skipped by comparing
  // the stored weight against the live one. Ties eliminate the lower index.
  struct Entry {
    double weight;
    int idx;
    bool operator<(const Entry& o) const {
      if (weight != o.weight) return weight < o.weight;
      return idx > o.idx;
    }
  };
  std::priority_queue<Entry> heap;
  for (std::size_t i = 0; i < n; ++i) heap.push({weight[i], static_cast<int>(i)});

  std::vector<char> alive(n, 1);
  std::size_t remaining = n;
  while (remaining > static_cast<std::size_t>(target_count)) {
    Entry top = heap.top();
    heap.pop();
    if (!alive[top.idx] || top.weight != weight[top.idx]) continue;
    alive[top.idx] = 0;
    --remaining;
    for (const auto& nb : neighbors[top.idx]) {
      if (!alive[nb.index]) continue;
      double w = 1.0 - nb.dist / r_max;
      weight[nb.index] -= w * w * w * w * w * w * w * w;
      heap.push({weight[nb.index], nb.index});
    }
  }

  PointCloud out;
  out.points.reserve(target_count);
  if (candidates.has_normals()) out.normals.reserve(target_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    out.points.push_back(candidates.points[i]);
    if (candidates.has_normals()) out.normals.push_back(candidates.normals[i]);
  }
  return out;
}

// Poisson-disk surface sampling by sample elimination: oversample the mesh
// uniformly by 4x, then eliminate down to the exact target count.
inline PointCloud poisson_disk_sample(const TriangleMesh& mesh, int target_count,
                                      std::uint64_t seed) {
  if (target_count < 1) throw InvalidArgumentError("poisson_disk_sample: target must be >= 1");
  double area = mesh_surface_area(mesh);
  if (area <= 0.0) throw DegenerateInputError("poisson_disk_sample: zero total area");
  PointCloud dense = sample_surface_uniform(mesh, 4 * target_count, seed);
  double r_max = 2.0 * poisson_radius_estimate(area, target_count);
  return weighted_sample_elimination(dense, target_count, r_max);
}

// Greedy max-min selection. Starts at index (seed mod size); each step adds
// the point with the largest distance to the selected set, ties resolved by
// the lowest index. Returns selected indices in selection order.
inline std::vector<int> farthest_point_sample_indices(const PointCloud& cloud, int count,
                                                      std::uint64_t seed) {
  if (count < 1) throw InvalidArgumentError("farthest_point_sample: count must be >= 1");
  if (static_cast<std::size_t>(count) > cloud.size()) {
    throw InvalidArgumentError("farthest_point_sample: count exceeds cloud size");
  }
  std::size_t n = cloud.size();
  std::vector<int> selected;
  selected.reserve(count);
  int start = static_cast<int>(seed % n);
  selected.push_back(start);
  std::vector<double> min_d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    min_d2[i] = squared_distance(cloud.points[i], cloud.points[start]);
  }
  while (static_cast<int>(selected.size()) < count) {
    int best = -1;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = static_cast<int>(i);
      }
    }
    selected.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      min_d2[i] = std::min(min_d2[i], squared_distance(cloud.points[i], cloud.points[best]));
    }
  }
  return selected;
}

inline PointCloud gather(const PointCloud& cloud, const std::vector<int>& indices) {
  PointCloud out;
  out.points.reserve(indices.size());
  if (cloud.has_normals()) out.normals.reserve(indices.size());
  for (int i : indices) {
    out.points.push_back(cloud.points[i]);
    if (cloud.has_normals()) out.normals.push_back(cloud.normals[i]);
  }
  return out;
}

inline PointCloud farthest_point_sample(const PointCloud& cloud, int count, std::uint64_t seed) {
  return gather(cloud, farthest_point_sample_indices(cloud, count, seed));
}

// Cuts `pairs_per_mesh` sparse/dense pairs from a mesh. Patch seeds are
// spread by FPS over a dense surface sample; each patch is the
// sparse_n*ratio*3 nearest samples around its seed, thinned to ratio*sparse_n
// by sample elimination, with the sparse side FPS-selected from the dense so
// sparse is a subset of dense. Both sides share the dense cloud's unit-sphere
// transform.
inline std::vector<PatchPair> extract_patch_pairs(const TriangleMesh& mesh, int pairs_per_mesh,
                                                  int sparse_n, int ratio, std::uint64_t seed,
                                                  const std::string& source_id = "mesh",
                                                  int surface_sample_count = 0) {
  if (pairs_per_mesh < 1) throw InvalidArgumentError("extract_patch_pairs: pairs must be >= 1");
  if (sparse_n < 8) throw InvalidArgumentError("extract_patch_pairs: sparse_n must be >= 8");
  if (ratio != 2 && ratio != 4 && ratio != 16) {
    throw InvalidArgumentError("extract_patch_pairs: ratio must be one of {2,4,16}");
  }
  int patch_size = sparse_n * ratio * 3;
  int sample_count =
      surface_sample_count > 0 ? surface_sample_count : std::max(16384, 4 * patch_size);
  if (patch_size > sample_count) {
    throw InvalidArgumentError("extract_patch_pairs: patch of " + std::to_string(patch_size) +
                               " exceeds surface sample budget of " +
                               std::to_string(sample_count));
  }
  double area = mesh_surface_area(mesh);
  if (area <= 0.0) throw DegenerateInputError("extract_patch_pairs: zero total area");

  PointCloud surface = sample_surface_uniform(mesh, sample_count, derive_seed(seed, 0));
  SpatialIndex index(surface);
  std::vector<int> seeds =
      farthest_point_sample_indices(surface, pairs_per_mesh, derive_seed(seed, 1));

  // Patch area scales with its share of the surface samples.
  double patch_area = area * static_cast<double>(patch_size) / sample_count;
  double r_max = 2.0 * poisson_radius_estimate(patch_area, ratio * sparse_n);

  std::vector<PatchPair> pairs;
  pairs.reserve(pairs_per_mesh);
  for (int t = 0; t < pairs_per_mesh; ++t) {
    Point3 seed_point = surface.points[seeds[t]];
    auto near = index.k_nearest(seed_point, patch_size);
    std::vector<int> ids;
    ids.reserve(near.size());
    for (const auto& nb : near) ids.push_back(nb.index);
    PointCloud patch = gather(surface, ids);
    PointCloud dense = weighted_sample_elimination(patch, ratio * sparse_n, r_max);
    PointCloud sparse = farthest_point_sample(dense, sparse_n, derive_seed(seed, 2 + t));
    auto [dense_norm, transform] = normalize_to_unit_sphere(dense);
    PatchPair pair;
    pair.dense = std::move(dense_norm);
    pair.sparse = transform.apply(sparse);
    pair.source_id = source_id + "_" + std::to_string(t);
    pair.seed_point = seed_point;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace medpu
