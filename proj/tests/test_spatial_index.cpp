#include <gtest/gtest.h>

#include "medpu/rng.hpp"
#include "medpu/spatial_index.hpp"
#include "support/oracles.hpp"
#include "support/shapes.hpp"

using namespace medpu;

TEST(SpatialIndex, SinglePointCloud) {
  PointCloud cloud;
  cloud.points = {{1, 2, 3}};
  SpatialIndex index(cloud);
  auto hit = index.nearest({0, 0, 0});
  EXPECT_EQ(hit.index, 0);
  EXPECT_DOUBLE_EQ(hit.dist, std::sqrt(14.0));
}

TEST(SpatialIndex, GridPointsNearestIsSelf) {
  PointCloud cloud;
  for (int i = 0; i < 10; ++i) cloud.points.push_back({double(i), 0, 0});
  SpatialIndex index(cloud);
  for (int i = 0; i < 10; ++i) {
    auto hit = index.nearest(cloud.points[i]);
    EXPECT_EQ(hit.index, i);
    EXPECT_DOUBLE_EQ(hit.dist, 0.0);
  }
}

TEST(SpatialIndex, TieBreaksByLowestIndex) {
  PointCloud cloud;
  cloud.points = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}};
  SpatialIndex index(cloud);
  auto hit = index.nearest({0, 0, 0});  // points 0 and 1 are equidistant
  EXPECT_EQ(hit.index, 0);
  EXPECT_DOUBLE_EQ(hit.dist, 1.0);
}

TEST(SpatialIndex, NearestMatchesBruteForceExactly) {
  Rng rng(42);
  auto cloud = shapes::random_cloud(rng, 5000, 1.0);
  SpatialIndex index(cloud);
  for (int q = 0; q < 200; ++q) {
    Vec3 query{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
    auto got = index.nearest(query);
    auto expected = oracles::brute_nearest(cloud, query);
    EXPECT_EQ(got.index, expected.index);
    EXPECT_EQ(got.dist, expected.dist);  // bit-identical
  }
}

TEST(SpatialIndex, KNearestMatchesBruteForceExactly) {
  Rng rng(43);
  auto cloud = shapes::random_cloud(rng, 2000, 1.0);
  SpatialIndex index(cloud);
  for (int q = 0; q < 50; ++q) {
    Vec3 query{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    int k = 1 + static_cast<int>(rng.index(32));
    auto got = index.k_nearest(query, k);
    auto expected = oracles::brute_k_nearest(cloud, query, k);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].index, expected[i].index);
      EXPECT_EQ(got[i].dist, expected[i].dist);
    }
  }
}

TEST(SpatialIndex, KNearestBounds) {
  Rng rng(44);
  auto cloud = shapes::random_cloud(rng, 64, 1.0);
  SpatialIndex index(cloud);

  // k equal to the cloud size returns the whole cloud sorted by distance.
  auto all = index.k_nearest({0, 0, 0}, 64);
  EXPECT_EQ(all.size(), 64u);
  for (std::size_t i = 1; i < all.size(); ++i) {
    EXPECT_LE(all[i - 1].dist, all[i].dist);
  }

  // k = 1 equals nearest.
  auto one = index.k_nearest({0.5, 0.5, 0.5}, 1);
  auto nn = index.nearest({0.5, 0.5, 0.5});
  EXPECT_EQ(one[0].index, nn.index);
  EXPECT_EQ(one[0].dist, nn.dist);

  EXPECT_THROW(index.k_nearest({0, 0, 0}, 65), InvalidArgumentError);
  EXPECT_THROW(index.k_nearest({0, 0, 0}, 0), InvalidArgumentError);
}

TEST(SpatialIndex, RadiusQueryMatchesBruteForceExactly) {
  Rng rng(45);
  auto cloud = shapes::random_cloud(rng, 3000, 1.0);
  SpatialIndex index(cloud);
  for (int q = 0; q < 50; ++q) {
    Vec3 query{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    double r = rng.uniform(0.0, 0.5);
    auto got = index.radius_query(query, r);
    auto expected = oracles::brute_radius(cloud, query, r);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].index, expected[i].index);
      EXPECT_EQ(got[i].dist, expected[i].dist);
    }
  }
}

TEST(SpatialIndex, RadiusQueryEdgeCases) {
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {1, 0, 0}, {0, 0, 0}};
  SpatialIndex index(cloud);

  // r = 0 off every point is empty; on a point returns coincident ones.
  EXPECT_TRUE(index.radius_query({5, 5, 5}, 0.0).empty());
  auto coincident = index.radius_query({0, 0, 0}, 0.0);
  ASSERT_EQ(coincident.size(), 2u);
  EXPECT_EQ(coincident[0].index, 0);
  EXPECT_EQ(coincident[1].index, 2);

  // r at least the diameter from a cloud point covers the whole cloud.
  EXPECT_EQ(index.radius_query({0, 0, 0}, 1.0).size(), 3u);

  EXPECT_THROW(index.radius_query({0, 0, 0}, -0.1), InvalidArgumentError);
  EXPECT_THROW(SpatialIndex(PointCloud{}), EmptyInputError);
}

TEST(SpatialIndex, EquidistantMidpointReturnsLowerIndex) {
  Rng rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    auto cloud = shapes::random_cloud(rng, 100, 1.0);
    std::size_t a = rng.index(100), b = rng.index(100);
    if (a == b) continue;
    // Query at the exact midpoint of two cloud points; brute force decides.
    Vec3 mid = (cloud.points[a] + cloud.points[b]) * 0.5;
    SpatialIndex index(cloud);
    auto got = index.nearest(mid);
    auto expected = oracles::brute_nearest(cloud, mid);
    EXPECT_EQ(got.index, expected.index);
  }
}
