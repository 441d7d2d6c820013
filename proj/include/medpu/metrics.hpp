#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"
#include "medpu/mesh_topology.hpp"
#include "medpu/parallel.hpp"
#include "medpu/point_mesh_distance.hpp"
#include "medpu/rng.hpp"
#include "medpu/sampling.hpp"
#include "medpu/spatial_index.hpp"

namespace medpu {

// Default distance threshold for the F-score family, expressed in normalized
// units: 1% of the unit-sphere diameter the evaluation frame is scaled to.
inline constexpr double kDefaultTau = 0.02;
inline constexpr double kDefaultEdgeAngleDeg = 30.0;
inline constexpr int kEdgeNeighborhood = 10;

namespace detail {

// Per-point nearest-neighbor distances from each point of `from` into `to`.
inline std::vector<double> nn_distances(const PointCloud& from, const SpatialIndex& to) {
  std::vector<double> dist(from.size());
  parallel_for(from.size(), [&](std::size_t i) {
    dist[i] = to.nearest(from.points[i]).dist;
  });
  return dist;
}

}  // namespace detail

// Symmetric sum of mean squared nearest-neighbor distances, each direction
// normalized by its own cardinality.
inline double chamfer_distance(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw EmptyInputError("chamfer_distance: empty point cloud");
  SpatialIndex ip(p), iq(q);
  auto dp = detail::nn_distances(p, iq);
  auto dq = detail::nn_distances(q, ip);
  double sum_p = 0.0;
  for (double d : dp) sum_p += d * d;
  double sum_q = 0.0;
  for (double d : dq) sum_q += d * d;
  return sum_p / static_cast<double>(p.size()) + sum_q / static_cast<double>(q.size());
}

// Worst-case nearest-neighbor distance, maximized over both directions.
inline double hausdorff_distance(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw EmptyInputError("hausdorff_distance: empty point cloud");
  SpatialIndex ip(p), iq(q);
  auto dp = detail::nn_distances(p, iq);
  auto dq = detail::nn_distances(q, ip);
  double worst = 0.0;
  for (double d : dp) worst = std::max(worst, d);
  for (double d : dq) worst = std::max(worst, d);
  return worst;
}

// Mean distance from each point to its closest location on the mesh surface.
inline double point_to_surface(const PointCloud& p, const TriangleMesh& surface) {
  if (p.empty()) throw EmptyInputError("point_to_surface: empty point cloud");
  MeshDistanceIndex index(surface);
  std::vector<double> dist(p.size());
  parallel_for(p.size(), [&](std::size_t i) { dist[i] = index.distance(p.points[i]); });
  double sum = 0.0;
  for (double d : dist) sum += d;
  return sum / static_cast<double>(p.size());
}

// F-score at threshold tau: harmonic mean of precision (fraction of p within
// tau of q) and recall (fraction of q within tau of p); 0 when both vanish.
inline double f_score(const PointCloud& p, const PointCloud& q, double tau) {
  if (!(tau > 0.0)) throw InvalidArgumentError("f_score: tau must be > 0");
  if (p.empty() || q.empty()) throw EmptyInputError("f_score: empty point cloud");
  SpatialIndex ip(p), iq(q);
  auto dp = detail::nn_distances(p, iq);
  auto dq = detail::nn_distances(q, ip);
  double hits_p = 0.0;
  for (double d : dp) hits_p += (d <= tau) ? 1.0 : 0.0;
  double hits_q = 0.0;
  for (double d : dq) hits_q += (d <= tau) ? 1.0 : 0.0;
  double precision = hits_p / static_cast<double>(p.size());
  double recall = hits_q / static_cast<double>(q.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

// Mean absolute normal dot product over nearest-neighbor pairings, averaged
// over both directions. 1 for perfectly aligned (or anti-aligned) normals.
inline double normal_consistency(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw EmptyInputError("normal_consistency: empty point cloud");
  if (!p.has_normals() || !q.has_normals()) {
    throw InvalidArgumentError("normal_consistency: both clouds need normals");
  }
  SpatialIndex ip(p), iq(q);
  std::vector<double> dp(p.size()), dq(q.size());
  parallel_for(p.size(), [&](std::size_t i) {
    int nn = iq.nearest(p.points[i]).index;
    dp[i] = std::abs(dot(p.normals[i], q.normals[nn]));
  });
  parallel_for(q.size(), [&](std::size_t i) {
    int nn = ip.nearest(q.points[i]).index;
    dq[i] = std::abs(dot(q.normals[i], p.normals[nn]));
  });
  double sum_p = 0.0;
  for (double d : dp) sum_p += d;
  double sum_q = 0.0;
  for (double d : dq) sum_q += d;
  return 0.5 * (sum_p / static_cast<double>(p.size()) + sum_q / static_cast<double>(q.size()));
}

// Points whose normals swing past a threshold against some near neighbor.
struct EdgeCloud {
  PointCloud points;
  std::vector<int> source_indices;
  double threshold_used = 0.0;  // degrees
};

// A point is an edge point iff the minimum |dot| between its normal and those
// of its k nearest neighbors drops below cos(angle_threshold_deg).
inline EdgeCloud detect_edges(const PointCloud& cloud, double angle_threshold_deg,
                              int k = kEdgeNeighborhood) {
  if (cloud.empty()) throw EmptyInputError("detect_edges: empty point cloud");
  if (!cloud.has_normals()) throw InvalidArgumentError("detect_edges: cloud needs normals");
  double cos_threshold = std::cos(angle_threshold_deg * 3.14159265358979323846 / 180.0);
  EdgeCloud edges;
  edges.threshold_used = angle_threshold_deg;
  int neighbors = std::min<int>(k, static_cast<int>(cloud.size()) - 1);
  if (neighbors < 1) return edges;
  SpatialIndex index(cloud);
  std::vector<char> is_edge(cloud.size(), 0);
  parallel_for(cloud.size(), [&](std::size_t i) {
    auto near = index.k_nearest(cloud.points[i], neighbors + 1);
    double min_dot = 1.0;
    for (const auto& nb : near) {
      if (static_cast<std::size_t>(nb.index) == i) continue;
      min_dot = std::min(min_dot, std::abs(dot(cloud.normals[i], cloud.normals[nb.index])));
    }
    is_edge[i] = min_dot < cos_threshold ? 1 : 0;
  });
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_edge[i]) continue;
    edges.points.points.push_back(cloud.points[i]);
    edges.points.normals.push_back(cloud.normals[i]);
    edges.source_indices.push_back(static_cast<int>(i));
  }
  return edges;
}

struct EdgeMetrics {
  double ecd = 0.0;  // +inf sentinel when exactly one edge set is empty
  double ef1 = 1.0;
};

// Chamfer distance and F-score restricted to detected edge points. With both
// edge sets empty the pair is a perfect match (0, 1); with exactly one empty
// the mismatch is total (+inf, 0).
inline EdgeMetrics edge_chamfer(const PointCloud& p, const PointCloud& q,
                                double angle_threshold_deg = kDefaultEdgeAngleDeg,
                                double tau = kDefaultTau) {
  EdgeCloud ep = detect_edges(p, angle_threshold_deg);
  EdgeCloud eq = detect_edges(q, angle_threshold_deg);
  if (ep.points.empty() && eq.points.empty()) return {0.0, 1.0};
  if (ep.points.empty() || eq.points.empty()) {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  return {chamfer_distance(ep.points, eq.points), f_score(ep.points, eq.points, tau)};
}

// Mean triangle quality 4*sqrt(3)*A / (l1^2 + l2^2 + l3^2): 1 for equilateral
// faces, 0 for degenerate ones.
inline double area_length_ratio(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) throw DegenerateInputError("area_length_ratio: mesh has no faces");
  constexpr double four_sqrt3 = 6.928203230275509;  // 4*sqrt(3)
  double sum = 0.0;
  bool any_area = false;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    double area = triangle_area(a, b, c);
    double len2 = squared_distance(a, b) + squared_distance(b, c) + squared_distance(c, a);
    if (area > 0.0 && len2 > 0.0) {
      sum += four_sqrt3 * area / len2;
      any_area = true;
    }
  }
  if (!any_area) throw DegenerateInputError("area_length_ratio: all faces degenerate");
  return sum / static_cast<double>(mesh.faces.size());
}

// Fraction of undirected edges shared by exactly two faces.
inline double manifoldness_rate(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) throw DegenerateInputError("manifoldness_rate: mesh has no faces");
  auto counts = edge_face_counts(mesh);
  int manifold = 0;
  for (const auto& [key, count] : counts) {
    if (count == 2) ++manifold;
  }
  return static_cast<double>(manifold) / static_cast<double>(counts.size());
}

// |observed face-connected components - expected|.
inline int connected_component_diff(const TriangleMesh& mesh, int expected) {
  if (expected < 1) throw InvalidArgumentError("connected_component_diff: expected must be >= 1");
  return std::abs(connected_component_count(mesh) - expected);
}

// Named scalar results of one evaluation plus the context needed to read
// them (normalization, thresholds, counts).
struct MetricReport {
  std::map<std::string, double> values;
  std::map<std::string, std::string> metadata;
};

struct EvaluateOptions {
  int sample_count = 16384;
  std::uint64_t seed = 0;
  double tau = kDefaultTau;
  double edge_angle_deg = kDefaultEdgeAngleDeg;
  int expected_cc = 0;  // 0: use the reference mesh's own component count
};

// Full mesh-vs-mesh evaluation: both meshes move into the reference mesh's
// unit-sphere frame, both are Poisson-disk sampled with normals, and the
// point-set metrics run on the samples while ALR/MR/CC run on the predicted
// mesh itself. P2F measures predicted samples against the reference surface.
inline MetricReport evaluate_pair(const TriangleMesh& pred, const TriangleMesh& gt,
                                  const EvaluateOptions& options = {}) {
  if (pred.faces.empty() || gt.faces.empty()) {
    throw DegenerateInputError("evaluate_pair: mesh has no faces");
  }
  PointCloud gt_vertices;
  gt_vertices.points = gt.vertices;
  NormalizationTransform transform = normalize_to_unit_sphere(gt_vertices).second;
  TriangleMesh gt_n = transform.apply(gt);
  TriangleMesh pred_n = transform.apply(pred);

  PointCloud pred_samples =
      poisson_disk_sample(pred_n, options.sample_count, derive_seed(options.seed, 11));
  PointCloud gt_samples =
      poisson_disk_sample(gt_n, options.sample_count, derive_seed(options.seed, 12));

  int expected_cc = options.expected_cc > 0 ? options.expected_cc
                                            : connected_component_count(gt_n);

  MetricReport report;
  report.values["cd"] = chamfer_distance(pred_samples, gt_samples);
  report.values["hd"] = hausdorff_distance(pred_samples, gt_samples);
  report.values["p2f"] = point_to_surface(pred_samples, gt_n);
  report.values["f1"] = f_score(pred_samples, gt_samples, options.tau);
  report.values["nc"] = normal_consistency(pred_samples, gt_samples);
  EdgeMetrics em = edge_chamfer(pred_samples, gt_samples, options.edge_angle_deg, options.tau);
  report.values["ecd"] = em.ecd;
  report.values["ef1"] = em.ef1;
  report.values["alr"] = area_length_ratio(pred_n);
  report.values["mr"] = manifoldness_rate(pred_n);
  report.values["cc_diff"] = connected_component_diff(pred_n, expected_cc);

  std::ostringstream meta;
  meta << "norm_center=" << transform.center.x << '/' << transform.center.y << '/'
       << transform.center.z << ";norm_scale=" << transform.scale
       << ";norm=unit_sphere;tau=" << options.tau << ";edge_angle_deg=" << options.edge_angle_deg
       << ";sample_count=" << options.sample_count << ";seed=" << options.seed
       << ";expected_cc=" << expected_cc << ";alr=4sqrt3A_over_sum_l2;p2f_ref=reference_mesh";
  report.metadata["context"] = meta.str();
  return report;
}

// CSV serialization: header "case,metric,value,meta", rows ordered by case
// then metric identifier. Non-finite values are written as "n/a".
inline void write_report_csv(std::ostream& out,
                             const std::vector<std::pair<std::string, MetricReport>>& cases) {
  out << "case,metric,value,meta\n";
  for (const auto& [name, report] : cases) {
    std::string meta;
    auto it = report.metadata.find("context");
    if (it != report.metadata.end()) meta = it->second;
    for (const auto& [metric, value] : report.values) {  // std::map: already sorted
      out << name << ',' << metric << ',';
      if (std::isfinite(value)) {
        std::ostringstream v;
        v << std::setprecision(12) << value;
        out << v.str();
      } else {
        out << "n/a";
      }
      out << ",\"" << meta << "\"\n";
    }
  }
}

}  // namespace medpu
