#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"
#include "medpu/marching_cubes_tables.hpp"
#include "medpu/voxel.hpp"

namespace medpu {

namespace detail {

// Cube corner offsets in Bourke numbering: counterclockwise around the
// bottom face (z = 0), then the top face.
inline constexpr int kCornerOffset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

// Cube edge -> (corner, corner).
inline constexpr int kEdgeCorner[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0},
    {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

// Cube edge -> global grid edge as (node offset, axis). Used to weld shared
// vertices across adjacent cells.
struct GridEdge {
  int di, dj, dk, axis;
};
inline constexpr GridEdge kGridEdge[12] = {
    {0, 0, 0, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1},
    {0, 0, 1, 0}, {1, 0, 1, 1}, {0, 1, 1, 0}, {0, 0, 1, 1},
    {0, 0, 0, 2}, {1, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2},
};

}  // namespace detail

// Extracts the isosurface of a scalar grid with the 256-case cube table.
// Grid values are samples at voxel centers; output vertices are in physical
// coordinates and shared across adjacent cells. Faces are oriented so that
// normals point toward the lower-valued side of the surface. An isovalue
// outside the data range yields an empty mesh.
inline TriangleMesh marching_cubes(const ScalarGrid& grid, double iso) {
  if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2) {
    throw InvalidArgumentError("marching_cubes: grid dims must be >= 2 on each axis");
  }
  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, int> edge_vertex;
  edge_vertex.reserve(1024);

  auto node_id = [&](int i, int j, int k) {
    return static_cast<std::uint64_t>(i) +
           static_cast<std::uint64_t>(grid.nx) *
               (static_cast<std::uint64_t>(j) +
                static_cast<std::uint64_t>(grid.ny) * static_cast<std::uint64_t>(k));
  };

  double corner_val[8];
  Vec3 corner_local[8];
  int corner_ijk[8][3];
  int edge_to_mesh_vertex[12];

  // Positions are built as origin + origin-free local offsets, so moving the
  // grid origin translates every vertex by exactly that vector.
  auto local_pos = [&grid](int i, int j, int k) -> Vec3 {
    return {(i + 0.5) * grid.spacing.x, (j + 0.5) * grid.spacing.y, (k + 0.5) * grid.spacing.z};
  };

  for (int k = 0; k + 1 < grid.nz; ++k) {
    for (int j = 0; j + 1 < grid.ny; ++j) {
      for (int i = 0; i + 1 < grid.nx; ++i) {
        int cube_index = 0;
        for (int c = 0; c < 8; ++c) {
          int ci = i + detail::kCornerOffset[c][0];
          int cj = j + detail::kCornerOffset[c][1];
          int ck = k + detail::kCornerOffset[c][2];
          corner_ijk[c][0] = ci;
          corner_ijk[c][1] = cj;
          corner_ijk[c][2] = ck;
          corner_val[c] = grid.at(ci, cj, ck);
          if (corner_val[c] < iso) cube_index |= 1 << c;
        }
        std::uint16_t edges = detail::kEdgeTable[cube_index];
        if (edges == 0) continue;
        for (int c = 0; c < 8; ++c) {
          corner_local[c] = local_pos(corner_ijk[c][0], corner_ijk[c][1], corner_ijk[c][2]);
        }
        for (int e = 0; e < 12; ++e) {
          if (!(edges & (1u << e))) continue;
          int ca = detail::kEdgeCorner[e][0];
          int cb = detail::kEdgeCorner[e][1];
          const auto& ge = detail::kGridEdge[e];
          std::uint64_t key =
              node_id(i + ge.di, j + ge.dj, k + ge.dk) * 3ull + static_cast<std::uint64_t>(ge.axis);
          auto [it, inserted] = edge_vertex.try_emplace(key, -1);
          if (inserted) {
            double va = corner_val[ca];
            double vb = corner_val[cb];
            double t = (vb == va) ? 0.5 : (iso - va) / (vb - va);
            Vec3 local = corner_local[ca] + (corner_local[cb] - corner_local[ca]) * t;
            it->second = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(grid.origin + local);
          }
          edge_to_mesh_vertex[e] = it->second;
        }
        // The table's winding already faces the lower-valued side.
        const auto* tri = detail::kTriTable[cube_index];
        for (int t = 0; tri[t] >= 0; t += 3) {
          int a = edge_to_mesh_vertex[tri[t]];
          int b = edge_to_mesh_vertex[tri[t + 1]];
          int c = edge_to_mesh_vertex[tri[t + 2]];
          if (a == b || b == c || c == a) continue;  // collapsed by welding
          mesh.faces.push_back({a, b, c});
        }
      }
    }
  }
  return mesh;
}

}  // namespace medpu
