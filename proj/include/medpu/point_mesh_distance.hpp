#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"

namespace medpu {

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection):
// classify p against the Voronoi regions of the vertices, edges and interior.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
  Vec3 ab = b - a;
  Vec3 ac = c - a;
  Vec3 ap = p - a;
  double d1 = dot(ab, ap);
  double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  Vec3 bp = p - b;
  double d3 = dot(ab, bp);
  double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    double v = d1 / (d1 - d3);
    return a + ab * v;
  }

  Vec3 cp = p - c;
  double d5 = dot(ab, cp);
  double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    double w = d2 / (d2 - d6);
    return a + ac * w;
  }

  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }

  double denom = 1.0 / (va + vb + vc);
  double v = vb * denom;
  double w = vc * denom;
  return a + ab * v + ac * w;
}

inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
  return distance(p, closest_point_on_triangle(p, a, b, c));
}

// AABB hierarchy over mesh triangles for minimum-distance queries. Results
// equal a brute-force scan over all faces: box bounds never exceed true
// triangle distances, so pruning cannot skip the minimum.
class MeshDistanceIndex {
 public:
  explicit MeshDistanceIndex(const TriangleMesh& mesh) : mesh_(mesh) {
    if (mesh.faces.empty()) throw DegenerateInputError("MeshDistanceIndex: mesh has no faces");
    order_.resize(mesh.faces.size());
    std::iota(order_.begin(), order_.end(), 0);
    centroids_.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
      centroids_.push_back(
          (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0);
    }
    nodes_.reserve(2 * mesh.faces.size() / kLeafSize + 2);
    build_node(0, static_cast<int>(mesh.faces.size()));
  }

  // Minimum unsquared distance from p to the mesh surface.
  double distance(const Vec3& p) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    query(0, p, best_d2);
    return std::sqrt(best_d2);
  }

 private:
  static constexpr int kLeafSize = 4;

  struct Node {
    AABB box;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };

  int build_node(int begin, int end) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    AABB box;
    for (int i = begin; i < end; ++i) {
      const auto& f = mesh_.faces[order_[i]];
      box.extend(mesh_.vertices[f[0]]);
      box.extend(mesh_.vertices[f[1]]);
      box.extend(mesh_.vertices[f[2]]);
    }
    nodes_[id].box = box;
    if (end - begin <= kLeafSize) {
      nodes_[id].begin = begin;
      nodes_[id].end = end;
      return id;
    }
    Vec3 d = box.diagonal();
    int axis = (d.x >= d.y && d.x >= d.z) ? 0 : (d.y >= d.z ? 1 : 2);
    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [this, axis](int a, int b) {
                       double ca = centroids_[a][axis];
                       double cb = centroids_[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    int left = build_node(begin, mid);
    int right = build_node(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void query(int node_id, const Vec3& p, double& best_d2) const {
    const Node& node = nodes_[node_id];
    if (node.box.squared_exterior_distance(p) > best_d2) return;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const auto& f = mesh_.faces[order_[i]];
        Vec3 q = closest_point_on_triangle(p, mesh_.vertices[f[0]], mesh_.vertices[f[1]],
                                           mesh_.vertices[f[2]]);
        best_d2 = std::min(best_d2, squared_distance(p, q));
      }
      return;
    }
    double dl = nodes_[node.left].box.squared_exterior_distance(p);
    double dr = nodes_[node.right].box.squared_exterior_distance(p);
    if (dl <= dr) {
      query(node.left, p, best_d2);
      query(node.right, p, best_d2);
    } else {
      query(node.right, p, best_d2);
      query(node.left, p, best_d2);
    }
  }

  const TriangleMesh& mesh_;
  std::vector<int> order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

}  // namespace medpu
