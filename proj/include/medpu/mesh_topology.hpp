#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"

namespace medpu {

// Undirected edge key from a sorted vertex-index pair.
inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Count of incident faces per undirected edge.
inline std::unordered_map<std::uint64_t, int> edge_face_counts(const TriangleMesh& mesh) {
  std::unordered_map<std::uint64_t, int> counts;
  counts.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    counts[edge_key(f[0], f[1])]++;
    counts[edge_key(f[1], f[2])]++;
    counts[edge_key(f[2], f[0])]++;
  }
  return counts;
}

// Every edge incident to exactly two faces.
inline bool is_watertight(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) return false;
  for (const auto& [key, count] : edge_face_counts(mesh)) {
    if (count != 2) return false;
  }
  return true;
}

// V - E + F over referenced vertices.
inline int euler_characteristic(const TriangleMesh& mesh) {
  std::vector<char> used(mesh.vertices.size(), 0);
  for (const auto& f : mesh.faces) {
    used[f[0]] = used[f[1]] = used[f[2]] = 1;
  }
  int v = static_cast<int>(std::count(used.begin(), used.end(), 1));
  int e = static_cast<int>(edge_face_counts(mesh).size());
  int f = static_cast<int>(mesh.faces.size());
  return v - e + f;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

// Component label per face; faces are connected when they share an edge.
// Labels are consecutive and ordered by each component's lowest face index.
inline std::vector<int> face_components(const TriangleMesh& mesh) {
  detail::UnionFind uf(static_cast<int>(mesh.faces.size()));
  std::unordered_map<std::uint64_t, int> first_face;
  first_face.reserve(mesh.faces.size() * 3);
  for (int fi = 0; fi < static_cast<int>(mesh.faces.size()); ++fi) {
    const auto& f = mesh.faces[fi];
    for (auto [a, b] : {std::pair{f[0], f[1]}, std::pair{f[1], f[2]}, std::pair{f[2], f[0]}}) {
      auto [it, inserted] = first_face.try_emplace(edge_key(a, b), fi);
      if (!inserted) uf.unite(it->second, fi);
    }
  }
  std::vector<int> label(mesh.faces.size(), -1);
  std::unordered_map<int, int> root_to_label;
  int next = 0;
  for (int fi = 0; fi < static_cast<int>(mesh.faces.size()); ++fi) {
    int root = uf.find(fi);
    auto [it, inserted] = root_to_label.try_emplace(root, next);
    if (inserted) ++next;
    label[fi] = it->second;
  }
  return label;
}

inline int connected_component_count(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) return 0;
  auto labels = face_components(mesh);
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

// Keeps the `keep` components with the most faces; ties broken by the lower
// minimum face index. Kept faces stay in their original order and unused
// vertices are dropped.
inline TriangleMesh largest_components(const TriangleMesh& mesh, int keep) {
  if (keep < 1) throw InvalidArgumentError("largest_components: keep must be >= 1");
  if (mesh.faces.empty()) return mesh;
  auto labels = face_components(mesh);
  int n_comp = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> face_count(n_comp, 0);
  std::vector<int> min_face(n_comp, std::numeric_limits<int>::max());
  for (int fi = 0; fi < static_cast<int>(labels.size()); ++fi) {
    face_count[labels[fi]]++;
    min_face[labels[fi]] = std::min(min_face[labels[fi]], fi);
  }
  std::vector<int> rank(n_comp);
  std::iota(rank.begin(), rank.end(), 0);
  std::sort(rank.begin(), rank.end(), [&](int a, int b) {
    if (face_count[a] != face_count[b]) return face_count[a] > face_count[b];
    return min_face[a] < min_face[b];
  });
  std::vector<char> kept(n_comp, 0);
  for (int i = 0; i < std::min(keep, n_comp); ++i) kept[rank[i]] = 1;

  TriangleMesh out;
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (int fi = 0; fi < static_cast<int>(mesh.faces.size()); ++fi) {
    if (!kept[labels[fi]]) continue;
    std::array<int, 3> nf{};
    for (int c = 0; c < 3; ++c) {
      int v = mesh.faces[fi][c];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[v]);
      }
      nf[c] = remap[v];
    }
    out.faces.push_back(nf);
  }
  return out;
}

}  // namespace medpu
