#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "medpu/io.hpp"
#include "medpu/rng.hpp"
#include "support/shapes.hpp"

using namespace medpu;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "medpu_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Xyz, RoundTripWithAndWithoutNormals) {
  Rng rng(1);
  auto cloud = shapes::random_cloud(rng, 257, 12.5, true);
  fs::path path = temp_dir() / "cloud.xyz";
  save_xyz(cloud, path);
  PointCloud back = load_xyz(path);
  ASSERT_EQ(back.size(), cloud.size());
  ASSERT_TRUE(back.has_normals());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_EQ(back.points[i], cloud.points[i]);  // full-precision text round-trip
    EXPECT_EQ(back.normals[i], cloud.normals[i]);
  }

  cloud.normals.clear();
  save_xyz(cloud, path);
  back = load_xyz(path);
  EXPECT_FALSE(back.has_normals());
  EXPECT_EQ(back.size(), cloud.size());
}

TEST(Xyz, RejectsMalformedLines) {
  fs::path path = temp_dir() / "bad.xyz";
  std::ofstream(path) << "1 2 3\n4 5\n";
  EXPECT_THROW(load_xyz(path), IoError);
  std::ofstream(path) << "1 2 3\n4 5 6 7 8 9\n";  // mixed column count
  EXPECT_THROW(load_xyz(path), IoError);
  std::ofstream(path) << "nan 0 0\n";
  EXPECT_THROW(load_xyz(path), IoError);
  EXPECT_THROW(load_xyz(temp_dir() / "missing.xyz"), IoError);
}

TEST(Ply, MeshRoundTripBinaryAndAscii) {
  TriangleMesh mesh = shapes::sphere_mesh(2.0, 16, 8);
  for (bool binary : {true, false}) {
    fs::path path = temp_dir() / (binary ? "mesh_b.ply" : "mesh_a.ply");
    save_ply(mesh, path, binary);
    TriangleMesh back = load_mesh(path);
    ASSERT_EQ(back.vertex_count(), mesh.vertex_count());
    ASSERT_EQ(back.face_count(), mesh.face_count());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      // Vertices stored as float32.
      EXPECT_NEAR(mesh.vertices[i].x, back.vertices[i].x, 1e-6 * std::abs(mesh.vertices[i].x) + 1e-7);
    }
    EXPECT_EQ(back.faces, mesh.faces);
  }
}

TEST(Ply, CloudWithNormalsRoundTrip) {
  Rng rng(2);
  auto cloud = shapes::random_cloud(rng, 100, 3.0, true);
  fs::path path = temp_dir() / "cloud.ply";
  save_ply(cloud, path);
  PointCloud back = load_cloud(path);
  ASSERT_EQ(back.size(), cloud.size());
  ASSERT_TRUE(back.has_normals());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_NEAR(back.points[i].x, cloud.points[i].x, 1e-6);
    EXPECT_NEAR(back.normals[i].z, cloud.normals[i].z, 1e-6);
  }
}

TEST(Ply, RejectsTruncatedAndMalformed) {
  fs::path path = temp_dir() / "trunc.ply";
  {
    TriangleMesh mesh = shapes::cube_mesh();
    save_ply(mesh, path, true);
    auto size = fs::file_size(path);
    fs::resize_file(path, size - 7);
  }
  EXPECT_THROW(load_mesh(path), IoError);
  std::ofstream(path) << "not a ply\n";
  EXPECT_THROW(load_mesh(path), IoError);
  std::ofstream(path) << "ply\nformat binary_big_endian 1.0\nend_header\n";
  EXPECT_THROW(load_mesh(path), IoError);
}

TEST(Obj, RoundTripAndFanTriangulation) {
  TriangleMesh mesh = shapes::torus_mesh(3.0, 1.0, 12, 6);
  fs::path path = temp_dir() / "mesh.obj";
  save_obj(mesh, path);
  TriangleMesh back = load_obj(path);
  ASSERT_EQ(back.vertex_count(), mesh.vertex_count());
  EXPECT_EQ(back.faces, mesh.faces);

  // Quads fan-triangulate; v//vn references resolve to the vertex index.
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\n"
                      << "f 1//1 2//1 3//1 4//1\n";
  back = load_obj(path);
  ASSERT_EQ(back.face_count(), 2u);
  EXPECT_EQ(back.faces[0], (std::array<int, 3>{0, 1, 2}));
  EXPECT_EQ(back.faces[1], (std::array<int, 3>{0, 2, 3}));
}

TEST(Obj, RejectsBadIndices) {
  fs::path path = temp_dir() / "bad.obj";
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nf 1 2 3\n";
  EXPECT_THROW(load_obj(path), IoError);
  std::ofstream(path) << "v 0 0 0\nf 1 1\n";
  EXPECT_THROW(load_obj(path), IoError);
}
