#pragma once

// Synthetic test geometry: analytic meshes, random clouds, voxelized
// phantoms.

#include <cmath>
#include <cstdint>

#include "medpu/geometry.hpp"
#include "medpu/rng.hpp"
#include "medpu/voxel.hpp"

namespace shapes {

using medpu::PointCloud;
using medpu::Rng;
using medpu::ScalarGrid;
using medpu::TriangleMesh;
using medpu::Vec3;
using medpu::VoxelMask;

constexpr double kPi = 3.14159265358979323846;

// UV sphere with rings*segments quads split into triangles.
inline TriangleMesh sphere_mesh(double radius, int segments = 48, int rings = 24,
                                Vec3 center = {0, 0, 0}) {
  TriangleMesh mesh;
  mesh.vertices.push_back(center + Vec3{0, 0, radius});
  for (int r = 1; r < rings; ++r) {
    double phi = kPi * r / rings;
    for (int s = 0; s < segments; ++s) {
      double theta = 2.0 * kPi * s / segments;
      mesh.vertices.push_back(center + Vec3{radius * std::sin(phi) * std::cos(theta),
                                            radius * std::sin(phi) * std::sin(theta),
                                            radius * std::cos(phi)});
    }
  }
  mesh.vertices.push_back(center + Vec3{0, 0, -radius});
  int bottom = static_cast<int>(mesh.vertices.size()) - 1;
  auto ring_vertex = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) {
    mesh.faces.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  }
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      int c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      mesh.faces.push_back({a, c, b});
      mesh.faces.push_back({b, c, d});
    }
  }
  for (int s = 0; s < segments; ++s) {
    mesh.faces.push_back({bottom, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  }
  return mesh;
}

// Torus around the z axis: major radius R, tube radius r.
inline TriangleMesh torus_mesh(double major, double minor, int segments_u = 48,
                               int segments_v = 24, Vec3 center = {0, 0, 0}) {
  TriangleMesh mesh;
  for (int u = 0; u < segments_u; ++u) {
    double a = 2.0 * kPi * u / segments_u;
    for (int v = 0; v < segments_v; ++v) {
      double b = 2.0 * kPi * v / segments_v;
      mesh.vertices.push_back(center + Vec3{(major + minor * std::cos(b)) * std::cos(a),
                                            (major + minor * std::cos(b)) * std::sin(a),
                                            minor * std::sin(b)});
    }
  }
  auto vid = [&](int u, int v) {
    return (u % segments_u) * segments_v + (v % segments_v);
  };
  for (int u = 0; u < segments_u; ++u) {
    for (int v = 0; v < segments_v; ++v) {
      int a = vid(u, v), b = vid(u + 1, v), c = vid(u, v + 1), d = vid(u + 1, v + 1);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({b, d, c});
    }
  }
  return mesh;
}

// Axis-aligned cube surface: 12 triangles, outward winding.
inline TriangleMesh cube_mesh(double side = 1.0, Vec3 center = {0, 0, 0}) {
  TriangleMesh mesh;
  double h = side / 2.0;
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.push_back(center + Vec3{(i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h});
  }
  auto quad = [&](int a, int b, int c, int d) {
    mesh.faces.push_back({a, b, c});
    mesh.faces.push_back({a, c, d});
  };
  quad(0, 2, 3, 1);  // z = -h, normal -z
  quad(4, 5, 7, 6);  // z = +h, normal +z
  quad(0, 1, 5, 4);  // y = -h
  quad(2, 6, 7, 3);  // y = +h
  quad(0, 4, 6, 2);  // x = -h
  quad(1, 3, 7, 5);  // x = +h
  return mesh;
}

inline PointCloud random_cloud(Rng& rng, int count, double extent = 1.0, bool normals = false) {
  PointCloud cloud;
  cloud.points.reserve(count);
  for (int i = 0; i < count; ++i) {
    cloud.points.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                            rng.uniform(-extent, extent)});
  }
  if (normals) {
    cloud.normals.reserve(count);
    for (int i = 0; i < count; ++i) {
      Vec3 n{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      while (medpu::norm(n) < 1e-6) {
        n = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      }
      cloud.normals.push_back(medpu::normalized(n));
    }
  }
  return cloud;
}

// Random rotation from a uniform quaternion.
struct RigidMotion {
  double m[3][3];
  Vec3 t;
  Vec3 apply(const Vec3& p) const {
    return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + t.x,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + t.y,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + t.z};
  }
  PointCloud apply(const PointCloud& cloud) const {
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) out.points.push_back(apply(p));
    if (cloud.has_normals()) {
      out.normals.reserve(cloud.size());
      for (const auto& n : cloud.normals) {
        Vec3 r = apply(n) - t;  // rotate only
        out.normals.push_back(r);
      }
    }
    return out;
  }
};

inline RigidMotion random_rigid_motion(Rng& rng, double translation_extent = 2.0) {
  double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  double qw = std::sqrt(1 - u1) * std::sin(2 * kPi * u2);
  double qx = std::sqrt(1 - u1) * std::cos(2 * kPi * u2);
  double qy = std::sqrt(u1) * std::sin(2 * kPi * u3);
  double qz = std::sqrt(u1) * std::cos(2 * kPi * u3);
  RigidMotion rm;
  rm.m[0][0] = 1 - 2 * (qy * qy + qz * qz);
  rm.m[0][1] = 2 * (qx * qy - qz * qw);
  rm.m[0][2] = 2 * (qx * qz + qy * qw);
  rm.m[1][0] = 2 * (qx * qy + qz * qw);
  rm.m[1][1] = 1 - 2 * (qx * qx + qz * qz);
  rm.m[1][2] = 2 * (qy * qz - qx * qw);
  rm.m[2][0] = 2 * (qx * qz - qy * qw);
  rm.m[2][1] = 2 * (qy * qz + qx * qw);
  rm.m[2][2] = 1 - 2 * (qx * qx + qy * qy);
  rm.t = {rng.uniform(-translation_extent, translation_extent),
          rng.uniform(-translation_extent, translation_extent),
          rng.uniform(-translation_extent, translation_extent)};
  return rm;
}

// Signed distance fields (negative inside).
inline double sphere_sdf(const Vec3& p, const Vec3& center, double radius) {
  return medpu::distance(p, center) - radius;
}

inline double torus_sdf(const Vec3& p, const Vec3& center, double major, double minor) {
  Vec3 q = p - center;
  double ring = std::sqrt(q.x * q.x + q.y * q.y) - major;
  return std::sqrt(ring * ring + q.z * q.z) - minor;
}

// Rasterizes sdf <= 0 at voxel centers into a mask covering [lo, hi].
// Anisotropic spacing models CT-like thick-slice masks.
template <typename Sdf>
inline VoxelMask voxelize_sdf_anisotropic(Sdf&& sdf, Vec3 lo, Vec3 hi, Vec3 spacing) {
  VoxelMask mask;
  mask.spacing = spacing;
  mask.origin = lo;
  mask.nx = static_cast<int>(std::ceil((hi.x - lo.x) / spacing.x));
  mask.ny = static_cast<int>(std::ceil((hi.y - lo.y) / spacing.y));
  mask.nz = static_cast<int>(std::ceil((hi.z - lo.z) / spacing.z));
  mask.data.assign(mask.cell_count(), 0);
  for (int k = 0; k < mask.nz; ++k) {
    for (int j = 0; j < mask.ny; ++j) {
      for (int i = 0; i < mask.nx; ++i) {
        if (sdf(mask.voxel_center(i, j, k)) <= 0.0) mask.data[mask.linear(i, j, k)] = 1;
      }
    }
  }
  return mask;
}

template <typename Sdf>
inline VoxelMask voxelize_sdf(Sdf&& sdf, Vec3 lo, Vec3 hi, double spacing) {
  return voxelize_sdf_anisotropic(sdf, lo, hi, {spacing, spacing, spacing});
}

// Samples -sdf on a grid (positive inside), for marching cubes at iso 0.
template <typename Sdf>
inline ScalarGrid sdf_grid(Sdf&& sdf, Vec3 lo, Vec3 hi, int cells_per_axis) {
  ScalarGrid grid;
  grid.nx = grid.ny = grid.nz = cells_per_axis;
  grid.spacing = {(hi.x - lo.x) / cells_per_axis, (hi.y - lo.y) / cells_per_axis,
                  (hi.z - lo.z) / cells_per_axis};
  grid.origin = lo;
  grid.data.resize(grid.nx * static_cast<std::size_t>(grid.ny) * grid.nz);
  for (int k = 0; k < grid.nz; ++k) {
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        grid.data[grid.linear(i, j, k)] = -sdf(grid.voxel_center(i, j, k));
      }
    }
  }
  return grid;
}

}  // namespace shapes
