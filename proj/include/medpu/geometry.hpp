#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "medpu/error.hpp"

namespace medpu {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

using Point3 = Vec3;

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline constexpr double squared_norm(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(squared_norm(v)); }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return n > 0.0 ? v / n : Vec3{0.0, 0.0, 0.0};
}

// Squared distance, evaluated with one fixed operation order so that
// accelerated structures and brute-force scans agree bit for bit.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

inline double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt(squared_distance(a, b));
}

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// A finite set of 3D points with optional per-point unit normals.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Vec3> normals;  // empty, or one unit vector per point

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }
};

// Indexed triangle set. Faces reference vertices by position.
struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
};

struct AABB {
  Vec3 min{std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec3 max{-std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};

  void extend(const Vec3& p) {
    min.x = std::min(min.x, p.x); min.y = std::min(min.y, p.y); min.z = std::min(min.z, p.z);
    max.x = std::max(max.x, p.x); max.y = std::max(max.y, p.y); max.z = std::max(max.z, p.z);
  }
  Vec3 diagonal() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }

  // Squared distance from a point to the box, zero inside.
  double squared_exterior_distance(const Vec3& p) const {
    double dx = std::max({min.x - p.x, 0.0, p.x - max.x});
    double dy = std::max({min.y - p.y, 0.0, p.y - max.y});
    double dz = std::max({min.z - p.z, 0.0, p.z - max.z});
    return dx * dx + dy * dy + dz * dz;
  }
};

// Similarity transform mapping raw coordinates into a canonical frame:
// q = (p - center) / scale. Inverting after applying is the identity to
// within floating-point roundoff.
struct NormalizationTransform {
  Vec3 center{0.0, 0.0, 0.0};
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return (p - center) / scale; }
  Vec3 invert(const Vec3& q) const { return q * scale + center; }

  PointCloud apply(const PointCloud& cloud) const {
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) out.points.push_back(apply(p));
    out.normals = cloud.normals;  // pure translate + uniform scale
    return out;
  }
  PointCloud invert(const PointCloud& cloud) const {
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points) out.points.push_back(invert(p));
    out.normals = cloud.normals;
    return out;
  }
  TriangleMesh apply(const TriangleMesh& mesh) const {
    TriangleMesh out;
    out.vertices.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) out.vertices.push_back(apply(v));
    out.faces = mesh.faces;
    return out;
  }
};

inline AABB bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyInputError("bounding_box: empty point cloud");
  AABB box;
  for (const auto& p : cloud.points) box.extend(p);
  return box;
}

inline Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyInputError("centroid: empty point cloud");
  Vec3 sum{0.0, 0.0, 0.0};
  for (const auto& p : cloud.points) sum += p;
  return sum / static_cast<double>(cloud.size());
}

// Center at the centroid and scale by the maximum distance to it, so the
// result fits the unit sphere with at least one point on the boundary.
inline std::pair<PointCloud, NormalizationTransform> normalize_to_unit_sphere(
    const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyInputError("normalize_to_unit_sphere: empty point cloud");
  Vec3 c = centroid(cloud);
  double max_dist = 0.0;
  for (const auto& p : cloud.points) max_dist = std::max(max_dist, distance(p, c));
  if (max_dist == 0.0) {
    throw DegenerateInputError("normalize_to_unit_sphere: all points identical");
  }
  NormalizationTransform t{c, max_dist};
  return {t.apply(cloud), t};
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

inline double triangle_area(const TriangleMesh& mesh, int face_index) {
  const auto& f = mesh.faces[face_index];
  return triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
}

// Unit normal of a face by right-hand winding. Negates under winding reversal.
inline Vec3 face_normal(const TriangleMesh& mesh, int face_index) {
  const auto& f = mesh.faces[face_index];
  Vec3 n = cross(mesh.vertices[f[1]] - mesh.vertices[f[0]],
                 mesh.vertices[f[2]] - mesh.vertices[f[0]]);
  double len = norm(n);
  if (len == 0.0) throw DegenerateInputError("face_normal: zero-area face");
  return n / len;
}

inline double mesh_surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    area += triangle_area(mesh, static_cast<int>(i));
  }
  return area;
}

}  // namespace medpu
