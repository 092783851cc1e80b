#pragma once

#include <array>
#include <string>
#include <vector>

#include "tacloc/geometry.hpp"

namespace tacloc {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_faces() const { return faces.size(); }

  Vec3 face_raw_normal(std::size_t f) const {  // area-weighted (cross product)
    const auto& t = faces[f];
    return (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
  }
  Vec3 face_normal(std::size_t f) const;       // unit; zero-area faces throw
  double face_area(std::size_t f) const { return 0.5 * face_raw_normal(f).norm(); }
  double total_area() const;
  Vec3 face_centroid(std::size_t f) const {
    const auto& t = faces[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
  }

  /// Axis-aligned bounding box as (min, max).
  std::pair<Vec3, Vec3> bounding_box() const;

  /// Throws std::invalid_argument on out-of-range indices, non-finite
  /// vertices, or an empty face list.
  void validate() const;
};

/// Reads an ASCII OFF file (accepts `#` comments).
TriangleMesh load_off(const std::string& path);

/// Reads an ASCII STL file; coincident vertices are merged so that edge
/// adjacency is usable downstream.
TriangleMesh load_stl(const std::string& path);

/// Dispatches on extension: .off / .stl (case-insensitive).
TriangleMesh load_mesh(const std::string& path);

void save_off(const std::string& path, const TriangleMesh& mesh);

}  // namespace tacloc
