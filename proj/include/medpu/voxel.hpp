#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"
#include "medpu/io.hpp"

namespace medpu {

// Binary occupancy grid with physical spacing, x-fastest row-major storage.
struct VoxelMask {
  int nx = 0, ny = 0, nz = 0;
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
  std::vector<std::uint8_t> data;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t linear(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx) * (static_cast<std::size_t>(j) +
                                           static_cast<std::size_t>(ny) * static_cast<std::size_t>(k));
  }
  bool at(int i, int j, int k) const { return data[linear(i, j, k)] != 0; }
  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
  }
  // Physical center of voxel (i, j, k).
  Vec3 voxel_center(int i, int j, int k) const {
    return {origin.x + (i + 0.5) * spacing.x, origin.y + (j + 0.5) * spacing.y,
            origin.z + (k + 0.5) * spacing.z};
  }
};

// Real-valued grid with the same layout as VoxelMask.
struct ScalarGrid {
  int nx = 0, ny = 0, nz = 0;
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
  std::vector<double> data;

  std::size_t linear(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx) * (static_cast<std::size_t>(j) +
                                           static_cast<std::size_t>(ny) * static_cast<std::size_t>(k));
  }
  double at(int i, int j, int k) const { return data[linear(i, j, k)]; }
  Vec3 voxel_center(int i, int j, int k) const {
    return {origin.x + (i + 0.5) * spacing.x, origin.y + (j + 0.5) * spacing.y,
            origin.z + (k + 0.5) * spacing.z};
  }
};

// ---------------------------------------------------------------------------
// VMSK1 mask file: ASCII header "VMSK1 nx ny nz sx sy sz ox oy oz\n" followed
// by nx*ny*nz raw bytes (0/1), x-fastest.
// ---------------------------------------------------------------------------

inline VoxelMask load_mask(const std::filesystem::path& path) {
  auto in = detail::open_input(path, true);
  std::string header;
  if (!std::getline(in, header)) throw IoError("vmsk: missing header");
  std::istringstream hs(header);
  std::string magic;
  VoxelMask mask;
  if (!(hs >> magic >> mask.nx >> mask.ny >> mask.nz >> mask.spacing.x >> mask.spacing.y >>
        mask.spacing.z >> mask.origin.x >> mask.origin.y >> mask.origin.z) ||
      magic != "VMSK1") {
    throw IoError("vmsk: malformed header: " + header);
  }
  if (mask.nx <= 0 || mask.ny <= 0 || mask.nz <= 0 || mask.spacing.x <= 0.0 ||
      mask.spacing.y <= 0.0 || mask.spacing.z <= 0.0) {
    throw IoError("vmsk: non-positive dims or spacing");
  }
  mask.data.resize(mask.cell_count());
  if (!in.read(reinterpret_cast<char*>(mask.data.data()),
               static_cast<std::streamsize>(mask.data.size()))) {
    throw IoError("vmsk: truncated data in " + path.string());
  }
  for (auto& b : mask.data) {
    if (b > 1) throw IoError("vmsk: occupancy byte outside {0,1}");
  }
  return mask;
}

inline void save_mask(const VoxelMask& mask, const std::filesystem::path& path) {
  auto out = detail::open_output(path, true);
  out << "VMSK1 " << mask.nx << ' ' << mask.ny << ' ' << mask.nz << ' '
      << detail::format_double(mask.spacing.x) << ' ' << detail::format_double(mask.spacing.y)
      << ' ' << detail::format_double(mask.spacing.z) << ' '
      << detail::format_double(mask.origin.x) << ' ' << detail::format_double(mask.origin.y)
      << ' ' << detail::format_double(mask.origin.z) << '\n';
  out.write(reinterpret_cast<const char*>(mask.data.data()),
            static_cast<std::streamsize>(mask.data.size()));
  if (!out) throw IoError("vmsk: write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Surface extraction and voxelization.
// ---------------------------------------------------------------------------

// Physical centers of occupied voxels that touch an unoccupied 6-neighbor
// (out-of-bounds counts as unoccupied), in ascending linear index order.
inline PointCloud mask_to_surface_points(const VoxelMask& mask) {
  PointCloud cloud;
  auto occupied = [&](int i, int j, int k) {
    return mask.in_bounds(i, j, k) && mask.at(i, j, k);
  };
  bool any = false;
  for (int k = 0; k < mask.nz; ++k) {
    for (int j = 0; j < mask.ny; ++j) {
      for (int i = 0; i < mask.nx; ++i) {
        if (!mask.at(i, j, k)) continue;
        any = true;
        bool surface = !occupied(i - 1, j, k) || !occupied(i + 1, j, k) ||
                       !occupied(i, j - 1, k) || !occupied(i, j + 1, k) ||
                       !occupied(i, j, k - 1) || !occupied(i, j, k + 1);
        if (surface) cloud.points.push_back(mask.voxel_center(i, j, k));
      }
    }
  }
  if (!any) throw EmptyInputError("mask_to_surface_points: mask has no occupied voxels");
  return cloud;
}

inline constexpr std::size_t kDefaultMaxGridCells = 512ull * 512ull * 512ull;

// Cubic occupancy grid covering the cloud's bounding box with two padding
// voxels per side. A voxel is occupied iff at least one point falls in it;
// boundary points are assigned by flooring (p - origin) / voxel_size.
inline VoxelMask points_to_occupancy(const PointCloud& cloud, double voxel_size,
                                     std::size_t max_cells = kDefaultMaxGridCells) {
  if (cloud.empty()) throw EmptyInputError("points_to_occupancy: empty point cloud");
  if (!(voxel_size > 0.0)) throw InvalidArgumentError("points_to_occupancy: voxel_size must be > 0");
  for (const auto& p : cloud.points) {
    if (!is_finite(p)) {
      throw InvalidArgumentError("points_to_occupancy: non-finite point coordinate");
    }
  }
  AABB box = bounding_box(cloud);
  Vec3 extent = box.diagonal();
  // Size check in floating point first: casting an oversized dimension to
  // int would overflow before the cell-count guard could fire.
  double fnx = std::floor(extent.x / voxel_size) + 5.0;
  double fny = std::floor(extent.y / voxel_size) + 5.0;
  double fnz = std::floor(extent.z / voxel_size) + 5.0;
  if (!(fnx * fny * fnz <= static_cast<double>(max_cells))) {
    throw InvalidArgumentError("points_to_occupancy: grid of ~" +
                               std::to_string(fnx * fny * fnz) +
                               " cells exceeds limit of " + std::to_string(max_cells));
  }
  VoxelMask mask;
  mask.spacing = {voxel_size, voxel_size, voxel_size};
  mask.origin = box.min - Vec3{2 * voxel_size, 2 * voxel_size, 2 * voxel_size};
  mask.nx = static_cast<int>(fnx);
  mask.ny = static_cast<int>(fny);
  mask.nz = static_cast<int>(fnz);
  mask.data.assign(mask.cell_count(), 0);
  for (const auto& p : cloud.points) {
    int i = static_cast<int>(std::floor((p.x - mask.origin.x) / voxel_size));
    int j = static_cast<int>(std::floor((p.y - mask.origin.y) / voxel_size));
    int k = static_cast<int>(std::floor((p.z - mask.origin.z) / voxel_size));
    i = std::clamp(i, 0, mask.nx - 1);
    j = std::clamp(j, 0, mask.ny - 1);
    k = std::clamp(k, 0, mask.nz - 1);
    mask.data[mask.linear(i, j, k)] = 1;
  }
  return mask;
}

// Box-filters the occupancy over a cube of side 2*radius+1 with zero padding.
// Radius 0 copies the occupancy.
inline ScalarGrid occupancy_to_scalar(const VoxelMask& mask, int smoothing_radius) {
  if (smoothing_radius < 0) {
    throw InvalidArgumentError("occupancy_to_scalar: radius must be >= 0");
  }
  ScalarGrid grid;
  grid.nx = mask.nx;
  grid.ny = mask.ny;
  grid.nz = mask.nz;
  grid.spacing = mask.spacing;
  grid.origin = mask.origin;
  grid.data.resize(mask.cell_count());
  if (smoothing_radius == 0) {
    for (std::size_t c = 0; c < mask.data.size(); ++c) {
      grid.data[c] = mask.data[c] ? 1.0 : 0.0;
    }
    return grid;
  }
  int r = smoothing_radius;
  double inv_cells = 1.0 / ((2.0 * r + 1) * (2.0 * r + 1) * (2.0 * r + 1));
  for (int k = 0; k < mask.nz; ++k) {
    for (int j = 0; j < mask.ny; ++j) {
      for (int i = 0; i < mask.nx; ++i) {
        double sum = 0.0;
        for (int dk = -r; dk <= r; ++dk) {
          for (int dj = -r; dj <= r; ++dj) {
            for (int di = -r; di <= r; ++di) {
              int ii = i + di, jj = j + dj, kk = k + dk;
              if (mask.in_bounds(ii, jj, kk) && mask.at(ii, jj, kk)) sum += 1.0;
            }
          }
        }
        grid.data[grid.linear(i, j, k)] = sum * inv_cells;
      }
    }
  }
  return grid;
}

}  // namespace medpu
