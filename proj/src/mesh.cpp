#include "tacloc/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tacloc {

Vec3 TriangleMesh::face_normal(std::size_t f) const {
  const Vec3 raw = face_raw_normal(f);
  const double n = raw.norm();
  if (n < 1e-300) throw std::invalid_argument("mesh: zero-area face");
  return raw / n;
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) sum += face_area(f);
  return sum;
}

std::pair<Vec3, Vec3> TriangleMesh::bounding_box() const {
  if (vertices.empty()) throw std::invalid_argument("mesh: no vertices");
  Vec3 lo = vertices.front();
  Vec3 hi = lo;
  for (const Vec3& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

void TriangleMesh::validate() const {
  if (faces.empty()) throw std::invalid_argument("mesh: no faces");
  for (const Vec3& v : vertices) {
    if (!v.allFinite()) throw std::invalid_argument("mesh: non-finite vertex");
  }
  const int n = static_cast<int>(vertices.size());
  for (const auto& f : faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= n) {
        throw std::invalid_argument("mesh: face index out of range");
      }
    }
  }
}

namespace {

// Pulls the next non-comment, non-blank line.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto pos = line.find_first_not_of(" \t\r\n");
    if (pos != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TriangleMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("off: cannot open '" + path + "'");
  std::string line;
  if (!next_content_line(in, line)) throw std::runtime_error("off: empty file");
  {
    std::istringstream ls(line);
    std::string magic;
    ls >> magic;
    if (magic != "OFF") throw std::runtime_error("off: missing OFF header in '" + path + "'");
  }
  if (!next_content_line(in, line)) throw std::runtime_error("off: missing counts");
  long nv = 0, nf = 0, ne = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> nv >> nf >> ne)) throw std::runtime_error("off: bad counts line");
  }
  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_content_line(in, line)) throw std::runtime_error("off: truncated vertices");
    std::istringstream ls(line);
    Vec3 v;
    if (!(ls >> v.x() >> v.y() >> v.z()))
      throw std::runtime_error("off: bad vertex line");
    mesh.vertices.push_back(v);
  }
  mesh.faces.reserve(static_cast<std::size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    if (!next_content_line(in, line)) throw std::runtime_error("off: truncated faces");
    std::istringstream ls(line);
    int k;
    if (!(ls >> k)) throw std::runtime_error("off: bad face line");
    std::vector<int> poly(k);
    for (int j = 0; j < k; ++j) {
      if (!(ls >> poly[j])) throw std::runtime_error("off: bad face index");
    }
    // Fan-triangulate polygons so quad OFF files load too.
    for (int j = 1; j + 1 < k; ++j) {
      mesh.faces.push_back({poly[0], poly[j], poly[j + 1]});
    }
  }
  mesh.validate();
  return mesh;
}

TriangleMesh load_stl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("stl: cannot open '" + path + "'");
  std::string tok;
  if (!(in >> tok) || tok != "solid")
    throw std::runtime_error("stl: not an ASCII STL file: '" + path + "'");
  std::getline(in, tok);  // rest of the solid name line

  TriangleMesh mesh;
  std::map<std::array<double, 3>, int> vertex_ids;
  auto intern = [&](const Vec3& v) {
    const std::array<double, 3> key{v.x(), v.y(), v.z()};
    const auto [it, fresh] =
        vertex_ids.emplace(key, static_cast<int>(mesh.vertices.size()));
    if (fresh) mesh.vertices.push_back(v);
    return it->second;
  };

  std::string word;
  while (in >> word) {
    if (word == "endsolid") break;
    if (word == "facet") {
      double nx, ny, nz;
      std::string normal_kw, outer_kw, loop_kw;
      if (!(in >> normal_kw >> nx >> ny >> nz >> outer_kw >> loop_kw))
        throw std::runtime_error("stl: malformed facet header");
      int ids[3];
      for (int i = 0; i < 3; ++i) {
        std::string vertex_kw;
        Vec3 v;
        if (!(in >> vertex_kw >> v.x() >> v.y() >> v.z()) || vertex_kw != "vertex")
          throw std::runtime_error("stl: malformed vertex");
        ids[i] = intern(v);
      }
      std::string endloop_kw, endfacet_kw;
      if (!(in >> endloop_kw >> endfacet_kw))
        throw std::runtime_error("stl: malformed facet footer");
      mesh.faces.push_back({ids[0], ids[1], ids[2]});
    }
  }
  mesh.validate();
  return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
  std::string ext;
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == "off") return load_off(path);
  if (ext == "stl") return load_stl(path);
  throw std::runtime_error("mesh: unsupported extension on '" + path + "'");
}

void save_off(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("off: cannot open '" + path + "' for writing");
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  out << std::setprecision(9);
  for (const Vec3& v : mesh.vertices) {
    out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
  if (!out) throw std::runtime_error("off: write failed for '" + path + "'");
}

}  // namespace tacloc
