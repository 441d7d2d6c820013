#pragma once

// Umbrella header for the medpu library: segmentation-mask-to-mesh pipeline
// with deterministic point cloud upsampling and a point-set / mesh-quality
// evaluation suite.

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"
#include "medpu/io.hpp"
#include "medpu/marching_cubes.hpp"
#include "medpu/mesh_topology.hpp"
#include "medpu/metrics.hpp"
#include "medpu/pipeline.hpp"
#include "medpu/point_mesh_distance.hpp"
#include "medpu/rng.hpp"
#include "medpu/sampling.hpp"
#include "medpu/spatial_index.hpp"
#include "medpu/upsample.hpp"
#include "medpu/voxel.hpp"

namespace medpu {
inline constexpr const char* kVersion = "0.1.0";
}
