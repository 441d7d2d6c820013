#include <gtest/gtest.h>

#include "medpu/marching_cubes.hpp"
#include "medpu/mesh_topology.hpp"
#include "medpu/metrics.hpp"
#include "medpu/point_mesh_distance.hpp"
#include "support/oracles.hpp"
#include "support/shapes.hpp"

using namespace medpu;

namespace {

ScalarGrid sphere_field(int cells, double radius = 1.0) {
  auto sdf = [radius](const Vec3& p) { return shapes::sphere_sdf(p, {0, 0, 0}, radius); };
  double half = 1.4 * radius;
  return shapes::sdf_grid(sdf, {-half, -half, -half}, {half, half, half}, cells);
}

// Symmetric Hausdorff estimate between a mesh and the analytic sphere:
// vertex error against the sphere plus sphere-sample error against the mesh.
double mesh_sphere_hausdorff(const TriangleMesh& mesh, double radius) {
  double worst = 0.0;
  for (const auto& v : mesh.vertices) {
    worst = std::max(worst, std::abs(norm(v) - radius));
  }
  MeshDistanceIndex index(mesh);
  const int n = 2000;
  for (int i = 0; i < n; ++i) {  // Fibonacci sphere coverage
    double z = 1.0 - 2.0 * (i + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = 2.399963229728653 * i;
    Vec3 p{radius * r * std::cos(phi), radius * r * std::sin(phi), radius * z};
    worst = std::max(worst, index.distance(p));
  }
  return worst;
}

}  // namespace

TEST(MarchingCubes, SphereFieldIsClosedGenusZero) {
  TriangleMesh mesh = marching_cubes(sphere_field(32), 0.0);
  ASSERT_GT(mesh.face_count(), 0u);
  EXPECT_TRUE(is_watertight(mesh));
  EXPECT_DOUBLE_EQ(manifoldness_rate(mesh), 1.0);
  EXPECT_EQ(connected_component_count(mesh), 1);
  EXPECT_EQ(euler_characteristic(mesh), 2);
}

TEST(MarchingCubes, NormalsPointTowardLowerValues) {
  // Field is positive inside the sphere, so outward normals point toward
  // lower values; verify via both face orientation and enclosed volume.
  TriangleMesh mesh = marching_cubes(sphere_field(24), 0.0);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto& face = mesh.faces[f];
    Vec3 centroid_pos = (mesh.vertices[face[0]] + mesh.vertices[face[1]] +
                         mesh.vertices[face[2]]) / 3.0;
    EXPECT_GT(dot(face_normal(mesh, static_cast<int>(f)), centroid_pos), 0.0);
  }
  double volume = 0.0;
  for (const auto& f : mesh.faces) {
    volume += dot(mesh.vertices[f[0]], cross(mesh.vertices[f[1]], mesh.vertices[f[2]])) / 6.0;
  }
  EXPECT_GT(volume, 0.0);
  EXPECT_NEAR(volume, 4.0 / 3.0 * shapes::kPi, 0.15);
}

TEST(MarchingCubes, ConstantGridBelowIsoIsEmpty) {
  ScalarGrid grid;
  grid.nx = grid.ny = grid.nz = 4;
  grid.data.assign(64, 0.25);
  TriangleMesh mesh = marching_cubes(grid, 0.5);
  EXPECT_EQ(mesh.face_count(), 0u);
  EXPECT_EQ(mesh.vertex_count(), 0u);
}

TEST(MarchingCubes, IsoOutsideRangeIsEmpty) {
  ScalarGrid grid = sphere_field(8);
  double lo = *std::min_element(grid.data.begin(), grid.data.end());
  double hi = *std::max_element(grid.data.begin(), grid.data.end());
  EXPECT_EQ(marching_cubes(grid, hi + 1.0).face_count(), 0u);
  EXPECT_EQ(marching_cubes(grid, lo - 1.0).face_count(), 0u);
}

TEST(MarchingCubes, SingleCornerAboveIsoGivesOneTriangle) {
  ScalarGrid grid;
  grid.nx = grid.ny = grid.nz = 2;
  grid.data.assign(8, 0.0);
  grid.data[grid.linear(0, 0, 0)] = 1.0;
  TriangleMesh mesh = marching_cubes(grid, 0.5);
  EXPECT_EQ(mesh.face_count(), 1u);
  EXPECT_EQ(mesh.vertex_count(), 3u);
}

TEST(MarchingCubes, DegenerateEqualEndpointsPlaceMidpointVertex) {
  ScalarGrid grid;
  grid.nx = grid.ny = grid.nz = 2;
  grid.spacing = {1, 1, 1};
  // One corner exactly at iso with its x-neighbor also at iso exercises the
  // equal-endpoint rule on that edge.
  grid.data.assign(8, 1.0);
  grid.data[grid.linear(0, 0, 0)] = 0.0;
  grid.data[grid.linear(1, 0, 0)] = 0.25;
  TriangleMesh mesh = marching_cubes(grid, 0.25);
  for (const auto& v : mesh.vertices) {
    EXPECT_TRUE(is_finite(v));
  }
}

TEST(MarchingCubes, VerticesAreWeldedAcrossCells) {
  TriangleMesh mesh = marching_cubes(sphere_field(16), 0.0);
  // Welded vertices: no two vertices may coincide, and the closed-surface
  // edge census only works when interior edges are shared.
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < mesh.vertices.size(); ++j) {
      EXPECT_FALSE(mesh.vertices[i] == mesh.vertices[j]);
    }
  }
  EXPECT_TRUE(is_watertight(mesh));
}

TEST(MarchingCubes, HausdorffToAnalyticSphereDecreasesWithResolution) {
  TriangleMesh m16 = marching_cubes(sphere_field(16), 0.0);
  TriangleMesh m32 = marching_cubes(sphere_field(32), 0.0);
  TriangleMesh m64 = marching_cubes(sphere_field(64), 0.0);
  for (const auto* m : {&m16, &m32, &m64}) {
    EXPECT_TRUE(is_watertight(*m));
    EXPECT_EQ(euler_characteristic(*m), 2);  // genus 0 at every resolution
  }
  double h16 = mesh_sphere_hausdorff(m16, 1.0);
  double h32 = mesh_sphere_hausdorff(m32, 1.0);
  double h64 = mesh_sphere_hausdorff(m64, 1.0);
  EXPECT_LT(h64, h32);
  EXPECT_LT(h32, h16);
}

TEST(MarchingCubes, TranslationEquivariantWithExactArithmetic) {
  ScalarGrid grid = sphere_field(12);
  grid.spacing = {0.25, 0.25, 0.25};  // power-of-two spacing, exact shifts
  grid.origin = {0, 0, 0};
  TriangleMesh base = marching_cubes(grid, 0.0);
  Vec3 shift{8.0, -4.0, 2.0};
  grid.origin = shift;
  TriangleMesh moved = marching_cubes(grid, 0.0);
  ASSERT_EQ(moved.vertex_count(), base.vertex_count());
  ASSERT_EQ(moved.faces, base.faces);
  for (std::size_t i = 0; i < base.vertices.size(); ++i) {
    EXPECT_EQ(moved.vertices[i], base.vertices[i] + shift);
  }
}

TEST(MarchingCubes, RejectsTooSmallGrids) {
  ScalarGrid grid;
  grid.nx = grid.ny = 4;
  grid.nz = 1;
  grid.data.assign(16, 0.0);
  EXPECT_THROW(marching_cubes(grid, 0.5), InvalidArgumentError);
}

TEST(LargestComponents, KeepsBiggestAndBreaksTiesByFaceIndex) {
  // Two disjoint triangles: keep 1 selects the lower-indexed one.
  TriangleMesh two;
  two.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}, {6, 5, 5}, {5, 6, 5}};
  two.faces = {{0, 1, 2}, {3, 4, 5}};
  TriangleMesh kept = largest_components(two, 1);
  ASSERT_EQ(kept.face_count(), 1u);
  EXPECT_EQ(kept.vertices[0], (Vec3{0, 0, 0}));

  TriangleMesh sphere = marching_cubes(sphere_field(16), 0.0);
  TriangleMesh same = largest_components(sphere, 1);
  EXPECT_EQ(same.face_count(), sphere.face_count());
  EXPECT_EQ(same.vertex_count(), sphere.vertex_count());
}

TEST(LargestComponents, MatchesUnionFindOracleOnMultiComponentMesh) {
  // Three spheres of different resolutions -> components of distinct sizes.
  TriangleMesh combined;
  auto append = [&combined](const TriangleMesh& m) {
    int base = static_cast<int>(combined.vertices.size());
    combined.vertices.insert(combined.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (auto f : m.faces) {
      combined.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    }
  };
  append(shapes::sphere_mesh(1.0, 24, 12, {0, 0, 0}));
  append(shapes::sphere_mesh(1.0, 12, 6, {5, 0, 0}));
  append(shapes::sphere_mesh(1.0, 8, 4, {0, 5, 0}));
  EXPECT_EQ(connected_component_count(combined), 3);
  EXPECT_EQ(oracles::brute_component_count(combined), 3);

  TriangleMesh top2 = largest_components(combined, 2);
  EXPECT_EQ(connected_component_count(top2), 2);
  std::size_t expected_faces = 24 * 12 * 2 * 2 - 24 * 2 + 12 * 6 * 2 * 2 - 12 * 2;
  (void)expected_faces;
  EXPECT_LT(top2.face_count(), combined.face_count());
  TriangleMesh all = largest_components(combined, 10);
  EXPECT_EQ(all.face_count(), combined.face_count());

  EXPECT_THROW(largest_components(combined, 0), InvalidArgumentError);
}
