#include "tacloc/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tacloc {
namespace {

struct PlyProperty {
  std::string name;
  int byte_size = 0;   // 0 marks a list property
  bool is_float = false;
  int list_count_size = 0;
  int list_item_size = 0;
};

int scalar_size(const std::string& type) {
  if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
  if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
  if (type == "int" || type == "int32" || type == "uint" || type == "uint32" ||
      type == "float" || type == "float32") return 4;
  if (type == "double" || type == "float64") return 8;
  throw std::runtime_error("ply: unknown property type '" + type + "'");
}

bool is_float_type(const std::string& type) {
  return type == "float" || type == "float32" || type == "double" ||
         type == "float64";
}

double read_binary_scalar(std::istream& in, int byte_size, bool is_float) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), byte_size);
  if (!in) throw std::runtime_error("ply: truncated binary payload");
  if (is_float) {
    if (byte_size == 4) {
      float f;
      std::memcpy(&f, buf, 4);
      return static_cast<double>(f);
    }
    double d;
    std::memcpy(&d, buf, 8);
    return d;
  }
  std::uint64_t v = 0;
  for (int i = 0; i < byte_size; ++i) v |= std::uint64_t(buf[i]) << (8 * i);
  return static_cast<double>(v);
}

}  // namespace

void save_ply(const std::string& path, const OrientedPointCloud& cloud) {
  cloud.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ply: cannot open '" + path + "' for writing");
  out << "ply\n"
      << "format ascii 1.0\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float nx\nproperty float ny\nproperty float nz\n"
      << "end_header\n";
  out << std::setprecision(9);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const Vec3& n = cloud.normals[i];
    out << p.x() << ' ' << p.y() << ' ' << p.z() << ' '
        << n.x() << ' ' << n.y() << ' ' << n.z() << '\n';
  }
  if (!out) throw std::runtime_error("ply: write failed for '" + path + "'");
}

OrientedPointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ply: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ply: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw std::runtime_error("ply: missing magic in '" + path + "'");

  bool binary = false;
  long vertex_count = -1;
  std::vector<PlyProperty> vertex_props;
  // (element name, count, one-line-per-instance?) for elements besides vertex.
  struct OtherElement { long count; bool before_vertex; };
  std::vector<OtherElement> others;
  bool in_vertex_element = false;
  bool saw_vertex = false;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw std::runtime_error("ply: unsupported format '" + fmt + "'");
    } else if (tok == "element") {
      std::string name;
      long count;
      ls >> name >> count;
      if (name == "vertex") {
        vertex_count = count;
        in_vertex_element = true;
        saw_vertex = true;
      } else {
        in_vertex_element = false;
        others.push_back({count, !saw_vertex});
      }
    } else if (tok == "property") {
      if (!in_vertex_element) {
        if (!saw_vertex && binary) {
          // Binary payload ahead of the vertex block that we cannot size.
          throw std::runtime_error(
              "ply: binary element before vertex is unsupported");
        }
        continue;
      }
      std::string type;
      ls >> type;
      PlyProperty prop;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> prop.name;
        prop.list_count_size = scalar_size(count_type);
        prop.list_item_size = scalar_size(item_type);
      } else {
        prop.byte_size = scalar_size(type);
        prop.is_float = is_float_type(type);
        ls >> prop.name;
      }
      vertex_props.push_back(prop);
    } else if (tok == "end_header") {
      break;
    } else {
      throw std::runtime_error("ply: unexpected header token '" + tok + "'");
    }
  }
  if (vertex_count < 0) throw std::runtime_error("ply: no vertex element");

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
  for (int i = 0; i < static_cast<int>(vertex_props.size()); ++i) {
    const std::string& n = vertex_props[i].name;
    if (n == "x") ix = i;
    else if (n == "y") iy = i;
    else if (n == "z") iz = i;
    else if (n == "nx") inx = i;
    else if (n == "ny") iny = i;
    else if (n == "nz") inz = i;
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw std::runtime_error("ply: vertex element lacks x/y/z");
  const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;

  // Skip any ASCII elements listed before the vertices (one line each).
  for (const auto& other : others) {
    if (!other.before_vertex) continue;
    for (long i = 0; i < other.count; ++i) {
      if (!std::getline(in, line))
        throw std::runtime_error("ply: truncated pre-vertex element");
    }
  }

  OrientedPointCloud cloud;
  cloud.reserve(static_cast<std::size_t>(vertex_count));
  std::vector<double> values(vertex_props.size(), 0.0);

  for (long v = 0; v < vertex_count; ++v) {
    if (binary) {
      for (std::size_t i = 0; i < vertex_props.size(); ++i) {
        const PlyProperty& prop = vertex_props[i];
        if (prop.byte_size == 0) {
          const double count =
              read_binary_scalar(in, prop.list_count_size, false);
          for (long k = 0; k < static_cast<long>(count); ++k)
            read_binary_scalar(in, prop.list_item_size, false);
          values[i] = 0.0;
        } else {
          values[i] = read_binary_scalar(in, prop.byte_size, prop.is_float);
        }
      }
    } else {
      if (!std::getline(in, line))
        throw std::runtime_error("ply: truncated vertex data");
      std::istringstream ls(line);
      for (std::size_t i = 0; i < vertex_props.size(); ++i) {
        if (vertex_props[i].byte_size == 0) {
          long count;
          if (!(ls >> count)) throw std::runtime_error("ply: bad list property");
          double dummy;
          for (long k = 0; k < count; ++k) ls >> dummy;
          values[i] = 0.0;
        } else if (!(ls >> values[i])) {
          throw std::runtime_error("ply: bad vertex line " + std::to_string(v));
        }
      }
    }
    const Vec3 p(values[ix], values[iy], values[iz]);
    Vec3 n = Vec3::Zero();
    if (has_normals) n = Vec3(values[inx], values[iny], values[inz]);
    cloud.push_back(p, n);
  }
  return cloud;
}

void save_pose(const std::string& path, const RigidTransform& pose) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("pose: cannot open '" + path + "' for writing");
  const Mat4 m = pose.matrix();
  out << std::setprecision(17);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out << m(r, c) << (c == 3 ? '\n' : ' ');
    }
  }
  if (!out) throw std::runtime_error("pose: write failed for '" + path + "'");
}

RigidTransform load_pose(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("pose: cannot open '" + path + "'");
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (!(in >> m(r, c)))
        throw std::runtime_error("pose: expected 16 numbers in '" + path + "'");
    }
  }
  const Eigen::RowVector4d last = m.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::runtime_error("pose: last row must be 0 0 0 1 in '" + path + "'");
  }
  return RigidTransform::from_matrix(m);
}

}  // namespace tacloc
