// Procedural benchmark meshes and exact point-to-surface distance.
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "tacloc/bench.hpp"

namespace tacloc {
namespace {

using ParamFn = std::function<Vec3(double u, double v)>;  // u: latitude, v: longitude

/// Closed lat-long tessellation with collapsed poles. Winding is fixed
/// afterwards by the caller's outward-normal rule.
TriangleMesh lat_long_surface(int n_lat, int n_lon, const ParamFn& fn) {
  TriangleMesh mesh;
  const double u0 = -M_PI / 2.0, u1 = M_PI / 2.0;
  // Interior rings (poles handled as single vertices).
  for (int i = 1; i < n_lat; ++i) {
    const double u = u0 + (u1 - u0) * static_cast<double>(i) / n_lat;
    for (int j = 0; j < n_lon; ++j) {
      const double v = 2.0 * M_PI * static_cast<double>(j) / n_lon;
      mesh.vertices.push_back(fn(u, v));
    }
  }
  const int south = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(fn(u0, 0.0));
  const int north = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(fn(u1, 0.0));

  auto ring = [&](int i, int j) { return (i - 1) * n_lon + (j % n_lon); };
  for (int j = 0; j < n_lon; ++j) {
    mesh.faces.push_back({south, ring(1, j), ring(1, j + 1)});
    mesh.faces.push_back({north, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)});
  }
  for (int i = 1; i + 1 < n_lat; ++i) {
    for (int j = 0; j < n_lon; ++j) {
      const int a = ring(i, j), b = ring(i, j + 1);
      const int c = ring(i + 1, j + 1), d = ring(i + 1, j);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }
  return mesh;
}

/// Flips faces whose winding disagrees with `outward(centroid)`.
void orient_faces(TriangleMesh& mesh, const std::function<Vec3(const Vec3&)>& outward) {
  for (auto& f : mesh.faces) {
    const Vec3 raw = (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                         .cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    const Vec3 c = (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0;
    if (raw.dot(outward(c)) < 0.0) std::swap(f[1], f[2]);
  }
}

void orient_star_shaped(TriangleMesh& mesh, const Vec3& center) {
  orient_faces(mesh, [center](const Vec3& c) -> Vec3 { return c - center; });
}

double signed_pow(double w, double e) {
  return (w < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(w), e);
}

TriangleMesh superellipsoid(double ax, double ay, double az, double e1, double e2) {
  TriangleMesh mesh = lat_long_surface(48, 64, [=](double u, double v) {
    return Vec3(ax * signed_pow(std::cos(u), e1) * signed_pow(std::cos(v), e2),
                ay * signed_pow(std::cos(u), e1) * signed_pow(std::sin(v), e2),
                az * signed_pow(std::sin(u), e1));
  });
  orient_star_shaped(mesh, Vec3::Zero());
  return mesh;
}

struct Bump {
  Vec3 direction;  // unit
  double amplitude;
  double sigma;
};

/// Star-shaped bumpy surface: an ellipsoid radius field modulated by fixed
/// Gaussian lobes. Deliberately asymmetric so exact-recovery benchmarks have
/// a unique pose. Resolution must stay well below the narrowest lobe sigma.
TriangleMesh blob(double ax, double ay, double az, const std::vector<Bump>& bumps,
                  int rings = 56, int cols = 80) {
  auto radius = [&](const Vec3& d) {
    const double base = 1.0 / std::sqrt((d.x() / ax) * (d.x() / ax) +
                                        (d.y() / ay) * (d.y() / ay) +
                                        (d.z() / az) * (d.z() / az));
    double scale = 1.0;
    for (const Bump& b : bumps) {
      const double dist2 = (d - b.direction).squaredNorm();
      scale += b.amplitude * std::exp(-dist2 / (2.0 * b.sigma * b.sigma));
    }
    return base * scale;
  };
  TriangleMesh mesh = lat_long_surface(rings, cols, [&](double u, double v) -> Vec3 {
    const Vec3 d(std::cos(u) * std::cos(v), std::cos(u) * std::sin(v), std::sin(u));
    return radius(d) * d;  // explicit Vec3 return materializes the product here
  });
  orient_star_shaped(mesh, Vec3::Zero());
  return mesh;
}

TriangleMesh blob_a() {
  const std::vector<Bump> bumps = {
      {Vec3(0.83, 0.42, 0.36).normalized(), 0.16, 0.38},
      {Vec3(-0.61, 0.70, 0.37).normalized(), -0.11, 0.30},
      {Vec3(-0.23, -0.84, 0.49).normalized(), 0.13, 0.27},
      {Vec3(0.34, -0.40, -0.85).normalized(), -0.09, 0.33},
      {Vec3(-0.76, -0.20, -0.62).normalized(), 0.14, 0.24},
      {Vec3(0.12, 0.88, -0.46).normalized(), 0.10, 0.22},
      {Vec3(0.95, -0.28, -0.12).normalized(), -0.08, 0.26},
      {Vec3(-0.37, 0.12, 0.92).normalized(), 0.09, 0.20},
  };
  return blob(0.030, 0.024, 0.019, bumps);
}

TriangleMesh blob_b() {
  const std::vector<Bump> bumps = {
      {Vec3(0.56, 0.77, 0.31).normalized(), -0.13, 0.29},
      {Vec3(-0.90, 0.25, 0.35).normalized(), 0.15, 0.33},
      {Vec3(0.05, -0.62, 0.78).normalized(), 0.11, 0.24},
      {Vec3(0.71, -0.58, -0.40).normalized(), -0.10, 0.36},
      {Vec3(-0.43, -0.43, -0.80).normalized(), 0.12, 0.26},
      {Vec3(-0.15, 0.95, -0.27).normalized(), 0.09, 0.21},
      {Vec3(0.99, 0.10, 0.10).normalized(), 0.08, 0.19},
      {Vec3(-0.68, -0.72, 0.14).normalized(), -0.07, 0.23},
      {Vec3(0.20, 0.33, -0.92).normalized(), 0.10, 0.28},
      {Vec3(-0.28, 0.61, 0.74).normalized(), -0.09, 0.25},
  };
  return blob(0.027, 0.022, 0.025, bumps);
}

/// The studded pair: narrow, steep lobes sized near the descriptor support
/// radius. Smooth blobs starve histogram descriptors (surface pair angles
/// collapse into a couple of bins); these keep local geometry distinctive so
/// feature matching carries real signal under sensor noise.
TriangleMesh blob_c() {
  const std::vector<Bump> bumps = {
      {Vec3(0.82, 0.45, 0.36).normalized(), 0.34, 0.10},
      {Vec3(-0.58, 0.72, 0.38).normalized(), -0.22, 0.12},
      {Vec3(-0.25, -0.83, 0.50).normalized(), 0.30, 0.09},
      {Vec3(0.36, -0.42, -0.83).normalized(), -0.20, 0.13},
      {Vec3(-0.75, -0.22, -0.62).normalized(), 0.33, 0.08},
      {Vec3(0.10, 0.89, -0.45).normalized(), 0.26, 0.11},
      {Vec3(0.95, -0.26, -0.14).normalized(), -0.18, 0.10},
      {Vec3(-0.35, 0.14, 0.93).normalized(), 0.28, 0.09},
      {Vec3(0.55, 0.18, 0.82).normalized(), 0.24, 0.12},
      {Vec3(-0.05, -0.45, -0.89).normalized(), 0.31, 0.10},
      {Vec3(0.44, 0.88, 0.17).normalized(), -0.17, 0.14},
      {Vec3(-0.92, 0.37, -0.11).normalized(), 0.27, 0.11},
      {Vec3(0.13, -0.98, -0.13).normalized(), 0.25, 0.09},
      {Vec3(-0.54, -0.56, 0.63).normalized(), -0.19, 0.12},
      {Vec3(0.69, -0.70, 0.20).normalized(), 0.29, 0.10},
      {Vec3(-0.20, 0.56, -0.80).normalized(), 0.23, 0.13},
      {Vec3(0.31, 0.45, 0.84).normalized(), -0.16, 0.10},
      {Vec3(-0.79, 0.11, 0.60).normalized(), 0.32, 0.08},
  };
  return blob(0.030, 0.024, 0.019, bumps, 96, 128);
}

TriangleMesh blob_d() {
  const std::vector<Bump> bumps = {
      {Vec3(0.58, 0.75, 0.32).normalized(), -0.21, 0.11},
      {Vec3(-0.89, 0.27, 0.36).normalized(), 0.33, 0.09},
      {Vec3(0.07, -0.60, 0.80).normalized(), 0.27, 0.12},
      {Vec3(0.72, -0.56, -0.41).normalized(), -0.18, 0.10},
      {Vec3(-0.45, -0.41, -0.79).normalized(), 0.30, 0.08},
      {Vec3(-0.13, 0.96, -0.25).normalized(), 0.24, 0.13},
      {Vec3(0.98, 0.12, 0.12).normalized(), 0.28, 0.10},
      {Vec3(-0.66, -0.74, 0.12).normalized(), -0.17, 0.12},
      {Vec3(0.22, 0.31, -0.92).normalized(), 0.31, 0.09},
      {Vec3(-0.26, 0.63, 0.73).normalized(), -0.20, 0.11},
      {Vec3(0.47, -0.12, 0.87).normalized(), 0.26, 0.10},
      {Vec3(-0.03, -0.92, -0.38).normalized(), 0.29, 0.09},
      {Vec3(0.85, 0.40, -0.34).normalized(), -0.16, 0.13},
      {Vec3(-0.57, 0.30, -0.76).normalized(), 0.25, 0.11},
      {Vec3(0.05, 0.05, 0.99).normalized(), 0.22, 0.12},
      {Vec3(-0.96, -0.24, -0.12).normalized(), 0.27, 0.10},
      {Vec3(0.62, 0.60, 0.50).normalized(), 0.26, 0.10},
      {Vec3(-0.33, -0.12, 0.94).normalized(), -0.18, 0.11},
  };
  return blob(0.026, 0.029, 0.021, bumps, 96, 128);
}

/// Appends a parametric sheet; the winding makes the raw face normal follow
/// dP/ds x dP/dt, so the caller picks (s, t) axes to point it outward.
void add_grid_sheet(TriangleMesh& mesh, int nu, int nv, const ParamFn& fn) {
  const int base = static_cast<int>(mesh.vertices.size());
  for (int i = 0; i <= nu; ++i) {
    for (int j = 0; j <= nv; ++j) {
      mesh.vertices.push_back(
          fn(static_cast<double>(i) / nu, static_cast<double>(j) / nv));
    }
  }
  auto vid = [&](int i, int j) { return base + i * (nv + 1) + j; };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      mesh.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
}

/// Merges bitwise-identical vertices so independently built sheets become
/// edge-connected where they meet.
void weld_vertices(TriangleMesh& mesh) {
  std::map<std::array<double, 3>, int> seen;
  std::vector<int> remap(mesh.vertices.size());
  std::vector<Vec3> verts;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec3& p = mesh.vertices[v];
    const auto [it, inserted] =
        seen.try_emplace({p.x(), p.y(), p.z()}, static_cast<int>(verts.size()));
    if (inserted) verts.push_back(p);
    remap[v] = it->second;
  }
  for (auto& f : mesh.faces) {
    for (int& v : f) v = remap[v];
  }
  mesh.vertices = std::move(verts);
}

TriangleMesh box_wedge() {
  // Box [-30,30] x [-20,20] x [0,30] mm with an off-center V-groove engraved
  // across the top face (runs along y at x near +8 mm). The side walls follow
  // the groove profile so shared edges match bitwise and weld cleanly.
  // Winding is set per sheet (star-shaped orientation would misorient the
  // deep groove wall), so no global reorientation here.
  const double hx = 0.030, hy = 0.020, hz = 0.030;
  const double groove_x = 0.008, groove_half_width = 0.008, groove_depth = 0.008;
  const int nx = 40, ny = 20, nz = 15;
  auto X = [&](double s) { return -hx + 2.0 * hx * s; };
  auto Y = [&](double s) { return -hy + 2.0 * hy * s; };
  auto top_z = [&](double s) {
    const double d = std::abs(X(s) - groove_x);
    return hz - (d < groove_half_width
                     ? groove_depth * (1.0 - d / groove_half_width)
                     : 0.0);
  };
  TriangleMesh mesh;
  add_grid_sheet(mesh, nx, ny,
                 [&](double s, double t) { return Vec3(X(s), Y(t), top_z(s)); });
  add_grid_sheet(mesh, ny, nx,
                 [&](double s, double t) { return Vec3(X(t), Y(s), 0.0); });
  add_grid_sheet(mesh, nx, nz,
                 [&](double s, double t) { return Vec3(X(s), -hy, t * top_z(s)); });
  add_grid_sheet(mesh, nz, nx,
                 [&](double s, double t) { return Vec3(X(t), hy, s * top_z(t)); });
  add_grid_sheet(mesh, nz, ny,
                 [&](double s, double t) { return Vec3(-hx, Y(t), s * hz); });
  add_grid_sheet(mesh, ny, nz,
                 [&](double s, double t) { return Vec3(hx, Y(s), t * hz); });
  weld_vertices(mesh);
  return mesh;
}

TriangleMesh mug() {
  TriangleMesh mesh;
  const double wall_r = 0.021, height = 0.050;
  const int n_seg = 64, n_z = 24, n_r = 10;
  auto wall_radius = [&](double z) {
    return wall_r + 0.002 * std::sin(M_PI * z / height);
  };

  // Body: bottom disk, side wall, top disk (a capped surface of revolution).
  // Rings: radial across the bottom, up the wall, then radially back to the
  // top-center vertex.
  std::vector<int> ring_start;
  auto add_ring = [&](double r, double z) {
    ring_start.push_back(static_cast<int>(mesh.vertices.size()));
    if (r <= 1e-12) {
      mesh.vertices.push_back(Vec3(0, 0, z));
      return 1;
    }
    for (int j = 0; j < n_seg; ++j) {
      const double a = 2.0 * M_PI * j / n_seg;
      mesh.vertices.push_back(Vec3(r * std::cos(a), r * std::sin(a), z));
    }
    return n_seg;
  };
  std::vector<int> ring_size;
  ring_size.push_back(add_ring(0.0, 0.0));
  for (int i = 1; i <= n_r; ++i) {
    ring_size.push_back(add_ring(wall_radius(0.0) * i / n_r, 0.0));
  }
  for (int i = 1; i <= n_z; ++i) {
    const double z = height * i / n_z;
    ring_size.push_back(add_ring(wall_radius(z), z));
  }
  for (int i = n_r - 1; i >= 0; --i) {
    ring_size.push_back(add_ring(wall_radius(height) * i / n_r, height));
  }
  for (std::size_t r = 0; r + 1 < ring_start.size(); ++r) {
    const int a0 = ring_start[r], b0 = ring_start[r + 1];
    const int na = ring_size[r], nb = ring_size[r + 1];
    if (na == 1) {
      for (int j = 0; j < nb; ++j) {
        mesh.faces.push_back({a0, b0 + j, b0 + (j + 1) % nb});
      }
    } else if (nb == 1) {
      for (int j = 0; j < na; ++j) {
        mesh.faces.push_back({b0, a0 + (j + 1) % na, a0 + j});
      }
    } else {
      for (int j = 0; j < n_seg; ++j) {
        const int a = a0 + j, b = a0 + (j + 1) % n_seg;
        const int c = b0 + (j + 1) % n_seg, d = b0 + j;
        mesh.faces.push_back({a, b, c});
        mesh.faces.push_back({a, c, d});
      }
    }
  }
  orient_star_shaped(mesh, Vec3(0, 0, height / 2.0));

  // Handle: a torus in the x-z plane beside the wall. It shares no vertices
  // with the body, so the mesh has two connected components on purpose.
  const Vec3 torus_center(0.030, 0.0, 0.025);
  const double ring_r = 0.012, tube_r = 0.0042;
  const int n_a = 40, n_b = 16;
  TriangleMesh handle;
  for (int ia = 0; ia < n_a; ++ia) {
    const double a = 2.0 * M_PI * ia / n_a;  // ring angle, x-z plane
    const Vec3 ring_dir(std::cos(a), 0.0, std::sin(a));
    for (int ib = 0; ib < n_b; ++ib) {
      const double b = 2.0 * M_PI * ib / n_b;  // tube angle
      handle.vertices.push_back(torus_center + (ring_r + tube_r * std::cos(b)) * ring_dir +
                                Vec3(0.0, tube_r * std::sin(b), 0.0));
    }
  }
  auto tv = [&](int ia, int ib) { return (ia % n_a) * n_b + (ib % n_b); };
  for (int ia = 0; ia < n_a; ++ia) {
    for (int ib = 0; ib < n_b; ++ib) {
      const int a = tv(ia, ib), b = tv(ia + 1, ib);
      const int c = tv(ia + 1, ib + 1), d = tv(ia, ib + 1);
      handle.faces.push_back({a, b, c});
      handle.faces.push_back({a, c, d});
    }
  }
  orient_faces(handle, [&](const Vec3& c) -> Vec3 {
    // Outward from the tube: away from the nearest ring-circle point.
    const Vec3 d(c.x() - torus_center.x(), 0.0, c.z() - torus_center.z());
    const Vec3 ring_pt = torus_center + ring_r * d.normalized();
    return c - ring_pt;
  });
  const int offset = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), handle.vertices.begin(), handle.vertices.end());
  for (const auto& f : handle.faces) {
    mesh.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  }
  return mesh;
}

TriangleMesh cone_sphere() {
  const double sphere_r = 0.020;
  const double join_lat = M_PI / 6.0;  // sphere kept below this latitude
  const Vec3 apex(0, 0, 0.045);
  TriangleMesh mesh;

  const int n_lat = 24, n_lon = 48;
  const double u0 = -M_PI / 2.0;
  for (int i = 1; i <= n_lat; ++i) {
    const double u = u0 + (join_lat - u0) * i / n_lat;
    for (int j = 0; j < n_lon; ++j) {
      const double v = 2.0 * M_PI * j / n_lon;
      mesh.vertices.push_back(sphere_r * Vec3(std::cos(u) * std::cos(v),
                                              std::cos(u) * std::sin(v), std::sin(u)));
    }
  }
  const int south = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(Vec3(0, 0, -sphere_r));

  auto ring = [&](int i, int j) { return (i - 1) * n_lon + (j % n_lon); };
  for (int j = 0; j < n_lon; ++j) mesh.faces.push_back({south, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i < n_lat; ++i) {
    for (int j = 0; j < n_lon; ++j) {
      const int a = ring(i, j), b = ring(i, j + 1);
      const int c = ring(i + 1, j + 1), d = ring(i + 1, j);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }

  // Cone flank from the join circle up to the apex, subdivided vertically.
  const int n_cone = 16;
  const double join_r = sphere_r * std::cos(join_lat);
  const double join_z = sphere_r * std::sin(join_lat);
  int prev_start = ring(n_lat, 0);
  for (int i = 1; i < n_cone; ++i) {
    const double t = static_cast<double>(i) / n_cone;
    const int start = static_cast<int>(mesh.vertices.size());
    for (int j = 0; j < n_lon; ++j) {
      const double a = 2.0 * M_PI * j / n_lon;
      const double r = join_r * (1.0 - t);
      const double z = join_z + (apex.z() - join_z) * t;
      mesh.vertices.push_back(Vec3(r * std::cos(a), r * std::sin(a), z));
    }
    for (int j = 0; j < n_lon; ++j) {
      const int a = prev_start + j, b = prev_start + (j + 1) % n_lon;
      const int c = start + (j + 1) % n_lon, d = start + j;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
    prev_start = start;
  }
  const int apex_id = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(apex);
  for (int j = 0; j < n_lon; ++j) {
    mesh.faces.push_back({apex_id, prev_start + j, prev_start + (j + 1) % n_lon});
  }
  orient_star_shaped(mesh, Vec3(0, 0, 0.005));
  return mesh;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

std::vector<Vec3> face_centroids(const TriangleMesh& mesh) {
  std::vector<Vec3> out;
  out.reserve(mesh.num_faces());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) out.push_back(mesh.face_centroid(f));
  return out;
}

}  // namespace

std::vector<std::string> procedural_mesh_names() {
  return {"superellipsoid_a", "superellipsoid_b", "superellipsoid_c",
          "box_wedge",        "mug",              "cone_sphere",
          "blob_a",           "blob_b",           "blob_c",
          "blob_d"};
}

TriangleMesh make_procedural_mesh(const std::string& name) {
  TriangleMesh mesh;
  if (name == "superellipsoid_a") {
    mesh = superellipsoid(0.030, 0.024, 0.020, 1.0, 1.0);
  } else if (name == "superellipsoid_b") {
    mesh = superellipsoid(0.030, 0.024, 0.020, 0.4, 0.4);
  } else if (name == "superellipsoid_c") {
    mesh = superellipsoid(0.030, 0.024, 0.020, 1.5, 0.7);
  } else if (name == "box_wedge") {
    mesh = box_wedge();
  } else if (name == "mug") {
    mesh = mug();
  } else if (name == "cone_sphere") {
    mesh = cone_sphere();
  } else if (name == "blob_a") {
    mesh = blob_a();
  } else if (name == "blob_b") {
    mesh = blob_b();
  } else if (name == "blob_c") {
    mesh = blob_c();
  } else if (name == "blob_d") {
    mesh = blob_d();
  } else {
    throw std::invalid_argument("make_procedural_mesh: unknown name '" + name + "'");
  }
  mesh.validate();
  return mesh;
}

MeshDistanceIndex::MeshDistanceIndex(const TriangleMesh& mesh)
    : mesh_(mesh), centroids_(face_centroids(mesh)), tree_(centroids_) {
  mesh_.validate();
  for (std::size_t f = 0; f < mesh_.num_faces(); ++f) {
    const auto& tri = mesh_.faces[f];
    for (int v : tri) {
      max_face_radius_ = std::max(max_face_radius_,
                                  (mesh_.vertices[v] - centroids_[f]).norm());
    }
  }
}

MeshDistanceIndex::Closest MeshDistanceIndex::closest(const Vec3& query) const {
  // Exact: the nearest centroid seeds an upper bound; any face that could
  // beat it has its centroid within bound + max face radius.
  const KdTree::Hit seed = tree_.nearest(query);
  Closest best;
  {
    const auto& tri = mesh_.faces[seed.index];
    best.point = closest_point_on_triangle(query, mesh_.vertices[tri[0]],
                                           mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
    best.face = seed.index;
    best.distance = (best.point - query).norm();
  }
  for (int f : tree_.radius_search(query, best.distance + max_face_radius_)) {
    if (f == seed.index) continue;
    const auto& tri = mesh_.faces[f];
    const Vec3 cp = closest_point_on_triangle(query, mesh_.vertices[tri[0]],
                                              mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
    const double d = (cp - query).norm();
    if (d < best.distance) {
      best.point = cp;
      best.face = f;
      best.distance = d;
    }
  }
  return best;
}

double MeshDistanceIndex::rms_distance(const std::vector<Vec3>& points) const {
  if (points.empty()) throw std::invalid_argument("rms_distance: no points");
  double sum = 0.0;
  for (const Vec3& p : points) {
    const double d = distance(p);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(points.size()));
}

}  // namespace tacloc
