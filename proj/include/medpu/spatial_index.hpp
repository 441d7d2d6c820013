#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"

namespace medpu {

// Neighbor query result: point index into the indexed cloud plus unsquared
// Euclidean distance.
struct Neighbor {
  int index = -1;
  double dist = 0.0;
};

// Kd-tree over a fixed point set. Queries reproduce a brute-force linear scan
// exactly: same distances (one fixed evaluation order), ties resolved by the
// lowest point index. Immutable after construction; safe for concurrent
// queries.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointCloud& cloud) : points_(cloud.points) {
    if (points_.empty()) throw EmptyInputError("SpatialIndex: empty point cloud");
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build_node(0, static_cast<int>(points_.size()));
  }

  std::size_t size() const { return points_.size(); }
  const Point3& point(int i) const { return points_[i]; }

  Neighbor nearest(const Vec3& query) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    nearest_impl(0, query, best_d2, best_idx);
    return {best_idx, std::sqrt(best_d2)};
  }

  // k nearest points sorted ascending by (distance, index).
  std::vector<Neighbor> k_nearest(const Vec3& query, int k) const {
    if (k < 1) throw InvalidArgumentError("k_nearest: k must be >= 1");
    if (static_cast<std::size_t>(k) > points_.size()) {
      throw InvalidArgumentError("k_nearest: k exceeds cloud size");
    }
    // Max-heap of candidate (d2, index); worst candidate on top.
    std::vector<std::pair<double, int>> heap;
    heap.reserve(k);
    k_nearest_impl(0, query, static_cast<std::size_t>(k), heap);
    std::sort(heap.begin(), heap.end());
    std::vector<Neighbor> out;
    out.reserve(heap.size());
    for (const auto& [d2, idx] : heap) out.push_back({idx, std::sqrt(d2)});
    return out;
  }

  // All points with distance <= r, sorted ascending by index.
  std::vector<Neighbor> radius_query(const Vec3& query, double r) const {
    if (r < 0.0) throw InvalidArgumentError("radius_query: negative radius");
    double r2 = r * r;
    std::vector<Neighbor> out;
    radius_impl(0, query, r2, out);
    std::sort(out.begin(), out.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    return out;
  }

 private:
  static constexpr int kLeafSize = 16;

  struct Node {
    AABB box;
    int left = -1;    // child node ids, -1 for leaf
    int right = -1;
    int begin = 0;    // leaf range into order_
    int end = 0;
  };

  int build_node(int begin, int end) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    AABB box;
    for (int i = begin; i < end; ++i) box.extend(points_[order_[i]]);
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
                       double ca = points_[a][axis];
                       double cb = points_[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    int left = build_node(begin, mid);
    int right = build_node(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void nearest_impl(int node_id, const Vec3& q, double& best_d2, int& best_idx) const {
    const Node& node = nodes_[node_id];
    // Prune only on strict >: an equal bound may still hide a lower index.
    if (node.box.squared_exterior_distance(q) > best_d2) return;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        int idx = order_[i];
        double d2 = squared_distance(points_[idx], q);
        if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
          best_d2 = d2;
          best_idx = idx;
        }
      }
      return;
    }
    double dl = nodes_[node.left].box.squared_exterior_distance(q);
    double dr = nodes_[node.right].box.squared_exterior_distance(q);
    if (dl <= dr) {
      nearest_impl(node.left, q, best_d2, best_idx);
      nearest_impl(node.right, q, best_d2, best_idx);
    } else {
      nearest_impl(node.right, q, best_d2, best_idx);
      nearest_impl(node.left, q, best_d2, best_idx);
    }
  }

  static bool heap_less(const std::pair<double, int>& a, const std::pair<double, int>& b) {
    return a < b;  // lexicographic (d2, index)
  }

  void k_nearest_impl(int node_id, const Vec3& q, std::size_t k,
                      std::vector<std::pair<double, int>>& heap) const {
    const Node& node = nodes_[node_id];
    if (heap.size() == k) {
      if (node.box.squared_exterior_distance(q) > heap.front().first) return;
    }
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        int idx = order_[i];
        std::pair<double, int> cand{squared_distance(points_[idx], q), idx};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), heap_less);
        } else if (cand < heap.front()) {
          std::pop_heap(heap.begin(), heap.end(), heap_less);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), heap_less);
        }
      }
      return;
    }
    double dl = nodes_[node.left].box.squared_exterior_distance(q);
    double dr = nodes_[node.right].box.squared_exterior_distance(q);
    if (dl <= dr) {
      k_nearest_impl(node.left, q, k, heap);
      k_nearest_impl(node.right, q, k, heap);
    } else {
      k_nearest_impl(node.right, q, k, heap);
      k_nearest_impl(node.left, q, k, heap);
    }
  }

  void radius_impl(int node_id, const Vec3& q, double r2, std::vector<Neighbor>& out) const {
    const Node& node = nodes_[node_id];
    if (node.box.squared_exterior_distance(q) > r2) return;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        int idx = order_[i];
        double d2 = squared_distance(points_[idx], q);
        if (d2 <= r2) out.push_back({idx, std::sqrt(d2)});
      }
      return;
    }
    radius_impl(node.left, q, r2, out);
    radius_impl(node.right, q, r2, out);
  }

  std::vector<Point3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace medpu
