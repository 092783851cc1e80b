#pragma once

#include <string>

#include "tacloc/geometry.hpp"

namespace tacloc {

/// Writes an ASCII PLY with per-vertex x y z nx ny nz.
void save_ply(const std::string& path, const OrientedPointCloud& cloud);

/// Reads a PLY point cloud. Accepts ascii and binary_little_endian formats,
/// float or double properties, in any property order; x/y/z are required and
/// nx/ny/nz default to zero when absent (callers needing normals should
/// validate). Non-vertex elements (e.g. faces) are skipped.
OrientedPointCloud load_ply(const std::string& path);

/// Writes a 4x4 pose as 16 whitespace-separated numbers, row-major, full
/// double precision.
void save_pose(const std::string& path, const RigidTransform& pose);

/// Reads a pose written by save_pose. Requires the last row to be 0 0 0 1 and
/// the upper-left block to be a rotation (within the drift tolerance).
RigidTransform load_pose(const std::string& path);

}  // namespace tacloc
