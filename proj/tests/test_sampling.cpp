#include <gtest/gtest.h>

#include <set>

#include "medpu/sampling.hpp"
#include "support/shapes.hpp"

using namespace medpu;

namespace {

// Smallest pairwise distance by full scan.
double brute_min_pairwise(const PointCloud& cloud) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      best = std::min(best, distance(cloud.points[i], cloud.points[j]));
    }
  }
  return best;
}

}  // namespace

TEST(SurfaceSampling, PointsStayInsideSingleTriangle) {
  TriangleMesh tri;
  tri.vertices = {{0, 0, 0}, {2, 0, 0}, {0, 2, 0}};
  tri.faces = {{0, 1, 2}};
  PointCloud cloud = sample_surface_uniform(tri, 1000, 3);
  ASSERT_EQ(cloud.size(), 1000u);
  ASSERT_TRUE(cloud.has_normals());
  for (const auto& p : cloud.points) {
    // Barycentric coordinates with respect to the right triangle.
    double u = p.x / 2.0, v = p.y / 2.0;
    EXPECT_GE(u, -1e-12);
    EXPECT_GE(v, -1e-12);
    EXPECT_LE(u + v, 1.0 + 1e-12);
    EXPECT_NEAR(p.z, 0.0, 1e-15);
  }
  for (const auto& n : cloud.normals) {
    EXPECT_NEAR(n.z, 1.0, 1e-12);
  }
}

TEST(SurfaceSampling, FaceSelectionFollowsAreaLaw) {
  // Two triangles with area ratio 3:1.
  TriangleMesh mesh;
  mesh.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 2, 0}, {10, 0, 0}, {11, 0, 0}, {10, 2, 0}};
  mesh.faces = {{0, 1, 2}, {3, 4, 5}};
  PointCloud cloud = sample_surface_uniform(mesh, 40000, 9);
  int on_large = 0;
  for (const auto& p : cloud.points) {
    if (p.x < 5.0) ++on_large;
  }
  double fraction = on_large / 40000.0;
  EXPECT_NEAR(fraction, 0.75, 0.02);
}

TEST(SurfaceSampling, DeterministicPerSeed) {
  TriangleMesh sphere = shapes::sphere_mesh(1.0, 16, 8);
  PointCloud a = sample_surface_uniform(sphere, 500, 42);
  PointCloud b = sample_surface_uniform(sphere, 500, 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.points[i], b.points[i]);
  }
  PointCloud c = sample_surface_uniform(sphere, 500, 43);
  bool any_different = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.points[i] == c.points[i])) any_different = true;
  }
  EXPECT_TRUE(any_different);
}

TEST(SurfaceSampling, DegenerateMeshThrows) {
  TriangleMesh flat;
  flat.vertices = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  flat.faces = {{0, 1, 2}};
  EXPECT_THROW(sample_surface_uniform(flat, 10, 0), DegenerateInputError);
}

TEST(SampleElimination, RequestingAllCandidatesIsIdentity) {
  Rng rng(5);
  auto cloud = shapes::random_cloud(rng, 200, 1.0);
  PointCloud out = weighted_sample_elimination(cloud, 200, 0.2);
  ASSERT_EQ(out.size(), cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_EQ(out.points[i], cloud.points[i]);
  }
}

TEST(PoissonDisk, SphereSamplingMeetsSpacingBound) {
  TriangleMesh sphere = shapes::sphere_mesh(1.0, 48, 24);
  int target = 1024;
  PointCloud cloud = poisson_disk_sample(sphere, target, 7);
  ASSERT_EQ(cloud.size(), static_cast<std::size_t>(target));
  double r_est = poisson_radius_estimate(mesh_surface_area(sphere), target);
  EXPECT_GE(brute_min_pairwise(cloud), 0.5 * r_est);
}

TEST(PoissonDisk, PlanePatchStaysInBounds) {
  TriangleMesh plane;
  plane.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  plane.faces = {{0, 1, 2}, {0, 2, 3}};
  PointCloud cloud = poisson_disk_sample(plane, 100, 3);
  ASSERT_EQ(cloud.size(), 100u);
  for (const auto& p : cloud.points) {
    EXPECT_GE(p.x, -1e-12);
    EXPECT_LE(p.x, 1.0 + 1e-12);
    EXPECT_GE(p.y, -1e-12);
    EXPECT_LE(p.y, 1.0 + 1e-12);
  }
}

TEST(PoissonDisk, ExactCountsAcrossShapesAndTargets) {
  std::vector<TriangleMesh> meshes = {shapes::sphere_mesh(1.0, 32, 16),
                                      shapes::torus_mesh(2.0, 0.7, 32, 16),
                                      shapes::cube_mesh(2.0)};
  for (const auto& mesh : meshes) {
    for (int target : {256, 1024}) {
      PointCloud cloud = poisson_disk_sample(mesh, target, 11);
      EXPECT_EQ(cloud.size(), static_cast<std::size_t>(target));
      double r_est = poisson_radius_estimate(mesh_surface_area(mesh), target);
      EXPECT_GE(brute_min_pairwise(cloud), 0.5 * r_est);
    }
  }
}

TEST(FarthestPoint, FullCountIsPermutation) {
  Rng rng(8);
  auto cloud = shapes::random_cloud(rng, 50, 1.0);
  PointCloud out = farthest_point_sample(cloud, 50, 3);
  ASSERT_EQ(out.size(), 50u);
  std::set<int> seen;
  for (const auto& p : out.points) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (cloud.points[i] == p) seen.insert(static_cast<int>(i));
    }
  }
  EXPECT_EQ(seen.size(), 50u);
}

TEST(FarthestPoint, SquareCornersPickDiagonal) {
  PointCloud square;
  square.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  // Seed 0 starts at index 0; the max-min choice is the diagonal corner.
  PointCloud out = farthest_point_sample(square, 2, 0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.points[0], (Vec3{0, 0, 0}));
  EXPECT_EQ(out.points[1], (Vec3{1, 1, 0}));
}

TEST(FarthestPoint, PrefixMatchesGreedyOracle) {
  Rng rng(9);
  auto cloud = shapes::random_cloud(rng, 300, 1.0);
  auto got = farthest_point_sample_indices(cloud, 64, 12345);

  // Re-derive every greedy step from scratch.
  std::vector<int> expected;
  expected.push_back(static_cast<int>(12345 % cloud.size()));
  while (expected.size() < 64) {
    int best = -1;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      double min_d2 = std::numeric_limits<double>::infinity();
      for (int s : expected) {
        min_d2 = std::min(min_d2, squared_distance(cloud.points[i], cloud.points[s]));
      }
      if (min_d2 > best_d2) {
        best_d2 = min_d2;
        best = static_cast<int>(i);
      }
    }
    expected.push_back(best);
  }
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i], expected[i]) << "step " << i;
  }
}

TEST(FarthestPoint, MinPairwiseDistanceNonIncreasingInCount) {
  Rng rng(10);
  auto cloud = shapes::random_cloud(rng, 400, 1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (int count : {8, 16, 32, 64, 128}) {
    PointCloud out = farthest_point_sample(cloud, count, 7);
    double spacing = brute_min_pairwise(out);
    EXPECT_LE(spacing, previous + 1e-15);
    previous = spacing;
  }
}

TEST(FarthestPoint, Errors) {
  Rng rng(11);
  auto cloud = shapes::random_cloud(rng, 10, 1.0);
  EXPECT_THROW(farthest_point_sample(cloud, 11, 0), InvalidArgumentError);
  EXPECT_THROW(farthest_point_sample(cloud, 0, 0), InvalidArgumentError);
}

TEST(PatchPairs, CountsSubsetAndSharedNormalization) {
  TriangleMesh sphere = shapes::sphere_mesh(10.0, 48, 24);
  int sparse_n = 64, ratio = 4;
  auto pairs = extract_patch_pairs(sphere, 4, sparse_n, ratio, 77, "sphere");
  ASSERT_EQ(pairs.size(), 4u);
  std::set<std::string> ids;
  for (const auto& pair : pairs) {
    EXPECT_EQ(pair.sparse.size(), static_cast<std::size_t>(sparse_n));
    EXPECT_EQ(pair.dense.size(), static_cast<std::size_t>(ratio * sparse_n));
    ids.insert(pair.source_id);

    // Every sparse point appears in the dense cloud (FPS subset).
    std::set<std::pair<double, double>> dense_xy;
    for (const auto& p : pair.dense.points) dense_xy.insert({p.x, p.y});
    for (const auto& p : pair.sparse.points) {
      EXPECT_TRUE(dense_xy.count({p.x, p.y}) > 0);
    }

    // Shared transform: the dense centroid sits at the origin.
    Vec3 c{0, 0, 0};
    for (const auto& p : pair.dense.points) c += p;
    c = c / static_cast<double>(pair.dense.size());
    EXPECT_NEAR(norm(c), 0.0, 1e-9);
    double max_norm = 0.0;
    for (const auto& p : pair.dense.points) max_norm = std::max(max_norm, norm(p));
    EXPECT_NEAR(max_norm, 1.0, 1e-9);
  }
  EXPECT_EQ(ids.size(), 4u);  // distinct per-pair ids
}

TEST(PatchPairs, DeterministicAndValidatesArguments) {
  TriangleMesh sphere = shapes::sphere_mesh(5.0, 32, 16);
  auto a = extract_patch_pairs(sphere, 2, 32, 2, 5, "s");
  auto b = extract_patch_pairs(sphere, 2, 32, 2, 5, "s");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].dense.size(), b[i].dense.size());
    for (std::size_t j = 0; j < a[i].dense.size(); ++j) {
      EXPECT_EQ(a[i].dense.points[j], b[i].dense.points[j]);
    }
  }
  EXPECT_THROW(extract_patch_pairs(sphere, 2, 4, 4, 5), InvalidArgumentError);   // sparse_n < 8
  EXPECT_THROW(extract_patch_pairs(sphere, 2, 32, 3, 5), InvalidArgumentError);  // bad ratio
  // Patch larger than the surface sample budget.
  EXPECT_THROW(extract_patch_pairs(sphere, 1, 64, 4, 5, "s", 500), InvalidArgumentError);
}
