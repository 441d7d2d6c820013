#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "medpu/error.hpp"
#include "medpu/geometry.hpp"

namespace medpu {

namespace detail {

inline std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

inline std::ifstream open_input(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

// Shortest decimal form that round-trips a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double parsed = std::strtod(buf, nullptr);
  if (parsed == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[32];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// XYZ: one point per line, "x y z" or "x y z nx ny nz", LF line endings.
// ---------------------------------------------------------------------------

inline PointCloud load_xyz(const std::filesystem::path& path) {
  auto in = detail::open_input(path, false);
  PointCloud cloud;
  std::string line;
  int columns = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v[6];
    int n = 0;
    while (n < 6 && (ls >> v[n])) ++n;
    if (n != 3 && n != 6) {
      throw IoError("xyz: line " + std::to_string(line_no) + " has " + std::to_string(n) +
                    " fields, expected 3 or 6");
    }
    if (columns == 0) columns = n;
    if (n != columns) {
      throw IoError("xyz: inconsistent column count at line " + std::to_string(line_no));
    }
    Vec3 p{v[0], v[1], v[2]};
    if (!is_finite(p)) throw IoError("xyz: non-finite coordinate at line " + std::to_string(line_no));
    cloud.points.push_back(p);
    if (n == 6) cloud.normals.push_back({v[3], v[4], v[5]});
  }
  return cloud;
}

inline void save_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  auto out = detail::open_output(path, true);
  bool with_normals = cloud.has_normals();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    out << detail::format_double(p.x) << ' ' << detail::format_double(p.y) << ' '
        << detail::format_double(p.z);
    if (with_normals) {
      const auto& n = cloud.normals[i];
      out << ' ' << detail::format_double(n.x) << ' ' << detail::format_double(n.y) << ' '
          << detail::format_double(n.z);
    }
    out << '\n';
  }
  if (!out) throw IoError("xyz: write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// PLY 1.0: ascii and binary_little_endian. Vertices are float32 x,y,z with
// optional float32 nx,ny,nz; faces are an int32 index list.
// ---------------------------------------------------------------------------

namespace detail {

struct PlyProperty {
  std::string type;        // scalar type, or list element type
  std::string count_type;  // non-empty for list properties
  std::string name;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
};

inline std::size_t ply_scalar_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" || type == "float" ||
      type == "float32")
    return 4;
  if (type == "double" || type == "float64" || type == "int64" || type == "uint64") return 8;
  throw IoError("ply: unknown scalar type " + type);
}

inline PlyHeader parse_ply_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("ply: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw IoError("ply: missing magic line");
  PlyHeader header;
  bool have_format = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    if (token == "comment" || token == "obj_info" || token.empty()) continue;
    if (token == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") header.binary = false;
      else if (fmt == "binary_little_endian") header.binary = true;
      else throw IoError("ply: unsupported format " + fmt);
      have_format = true;
    } else if (token == "element") {
      PlyElement el;
      ls >> el.name >> el.count;
      header.elements.push_back(el);
    } else if (token == "property") {
      if (header.elements.empty()) throw IoError("ply: property before element");
      PlyProperty prop;
      std::string first;
      ls >> first;
      if (first == "list") {
        ls >> prop.count_type >> prop.type >> prop.name;
      } else {
        prop.type = first;
        ls >> prop.name;
      }
      if (prop.name.empty()) throw IoError("ply: malformed property line");
      header.elements.back().properties.push_back(prop);
    } else if (token == "end_header") {
      if (!have_format) throw IoError("ply: missing format line");
      return header;
    } else {
      throw IoError("ply: unknown header token " + token);
    }
  }
  throw IoError("ply: missing end_header");
}

inline double ply_read_binary_scalar(std::istream& in, const std::string& type) {
  unsigned char buf[8];
  std::size_t size = ply_scalar_size(type);
  if (!in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(size))) {
    throw IoError("ply: truncated binary data");
  }
  auto as = [&](auto value) {
    std::memcpy(&value, buf, sizeof(value));
    return static_cast<double>(value);
  };
  if (type == "char" || type == "int8") return as(std::int8_t{});
  if (type == "uchar" || type == "uint8") return as(std::uint8_t{});
  if (type == "short" || type == "int16") return as(std::int16_t{});
  if (type == "ushort" || type == "uint16") return as(std::uint16_t{});
  if (type == "int" || type == "int32") return as(std::int32_t{});
  if (type == "uint" || type == "uint32") return as(std::uint32_t{});
  if (type == "float" || type == "float32") return as(float{});
  if (type == "double" || type == "float64") return as(double{});
  if (type == "int64") return as(std::int64_t{});
  if (type == "uint64") return as(std::uint64_t{});
  throw IoError("ply: unknown scalar type " + type);
}

inline double ply_read_ascii_scalar(std::istream& in) {
  double v;
  if (!(in >> v)) throw IoError("ply: truncated ascii data");
  return v;
}

struct PlyContents {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<std::array<int, 3>> faces;
};

inline PlyContents read_ply(const std::filesystem::path& path) {
  auto in = detail::open_input(path, true);
  PlyHeader header = parse_ply_header(in);
  PlyContents contents;
  for (const auto& el : header.elements) {
    if (el.name == "vertex") {
      int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
      for (int p = 0; p < static_cast<int>(el.properties.size()); ++p) {
        const auto& name = el.properties[p].name;
        if (name == "x") ix = p;
        else if (name == "y") iy = p;
        else if (name == "z") iz = p;
        else if (name == "nx") inx = p;
        else if (name == "ny") iny = p;
        else if (name == "nz") inz = p;
        if (!el.properties[p].count_type.empty()) {
          throw IoError("ply: list property on vertex element not supported");
        }
      }
      if (ix < 0 || iy < 0 || iz < 0) throw IoError("ply: vertex element missing x/y/z");
      bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;
      contents.vertices.reserve(el.count);
      std::vector<double> row(el.properties.size());
      for (std::size_t v = 0; v < el.count; ++v) {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          row[p] = header.binary ? ply_read_binary_scalar(in, el.properties[p].type)
                                 : ply_read_ascii_scalar(in);
        }
        contents.vertices.push_back({row[ix], row[iy], row[iz]});
        if (has_normals) contents.normals.push_back({row[inx], row[iny], row[inz]});
      }
    } else if (el.name == "face") {
      contents.faces.reserve(el.count);
      for (std::size_t f = 0; f < el.count; ++f) {
        for (const auto& prop : el.properties) {
          if (prop.count_type.empty()) {
            if (header.binary) ply_read_binary_scalar(in, prop.type);
            else ply_read_ascii_scalar(in);
            continue;
          }
          std::size_t n = static_cast<std::size_t>(
              header.binary ? ply_read_binary_scalar(in, prop.count_type)
                            : ply_read_ascii_scalar(in));
          std::vector<int> poly(n);
          for (std::size_t i = 0; i < n; ++i) {
            poly[i] = static_cast<int>(header.binary ? ply_read_binary_scalar(in, prop.type)
                                                     : ply_read_ascii_scalar(in));
          }
          if (prop.name != "vertex_indices" && prop.name != "vertex_index") continue;
          if (n < 3) throw IoError("ply: face with fewer than 3 indices");
          for (std::size_t i = 1; i + 1 < n; ++i) {  // fan triangulation
            contents.faces.push_back({poly[0], poly[i], poly[i + 1]});
          }
        }
      }
    } else {
      // Skip unknown elements.
      for (std::size_t r = 0; r < el.count; ++r) {
        for (const auto& prop : el.properties) {
          if (prop.count_type.empty()) {
            if (header.binary) ply_read_binary_scalar(in, prop.type);
            else ply_read_ascii_scalar(in);
          } else {
            std::size_t n = static_cast<std::size_t>(
                header.binary ? ply_read_binary_scalar(in, prop.count_type)
                              : ply_read_ascii_scalar(in));
            for (std::size_t i = 0; i < n; ++i) {
              if (header.binary) ply_read_binary_scalar(in, prop.type);
              else ply_read_ascii_scalar(in);
            }
          }
        }
      }
    }
  }
  for (const auto& f : contents.faces) {
    for (int c : f) {
      if (c < 0 || static_cast<std::size_t>(c) >= contents.vertices.size()) {
        throw IoError("ply: face index out of range");
      }
    }
  }
  return contents;
}

inline void write_ply(const std::filesystem::path& path, const std::vector<Vec3>& vertices,
                      const std::vector<Vec3>& normals,
                      const std::vector<std::array<int, 3>>& faces, bool binary) {
  auto out = detail::open_output(path, true);
  out << "ply\n";
  out << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
  out << "element vertex " << vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (!normals.empty()) {
    out << "property float nx\nproperty float ny\nproperty float nz\n";
  }
  out << "element face " << faces.size() << "\n";
  out << "property list uchar int vertex_indices\n";
  out << "end_header\n";
  auto put_float = [&](double v) {
    float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), sizeof(f));
  };
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (binary) {
      put_float(vertices[i].x);
      put_float(vertices[i].y);
      put_float(vertices[i].z);
      if (!normals.empty()) {
        put_float(normals[i].x);
        put_float(normals[i].y);
        put_float(normals[i].z);
      }
    } else {
      float x = static_cast<float>(vertices[i].x);
      float y = static_cast<float>(vertices[i].y);
      float z = static_cast<float>(vertices[i].z);
      out << format_double(x) << ' ' << format_double(y) << ' ' << format_double(z);
      if (!normals.empty()) {
        out << ' ' << format_double(static_cast<float>(normals[i].x)) << ' '
            << format_double(static_cast<float>(normals[i].y)) << ' '
            << format_double(static_cast<float>(normals[i].z));
      }
      out << '\n';
    }
  }
  for (const auto& f : faces) {
    if (binary) {
      std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      for (int c : f) {
        std::int32_t idx = c;
        out.write(reinterpret_cast<const char*>(&idx), sizeof(idx));
      }
    } else {
      out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
  }
  if (!out) throw IoError("ply: write failed: " + path.string());
}

}  // namespace detail

inline void save_ply(const PointCloud& cloud, const std::filesystem::path& path,
                     bool binary = true) {
  detail::write_ply(path, cloud.points, cloud.normals, {}, binary);
}

inline void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path,
                     bool binary = true) {
  detail::write_ply(path, mesh.vertices, {}, mesh.faces, binary);
}

// ---------------------------------------------------------------------------
// OBJ: v/vn/f records, 1-based indices, polygons fan-triangulated on read.
// ---------------------------------------------------------------------------

inline TriangleMesh load_obj(const std::filesystem::path& path) {
  auto in = detail::open_input(path, false);
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) {
        throw IoError("obj: bad vertex at line " + std::to_string(line_no));
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string ref;
      while (ls >> ref) {
        // Forms: v, v/vt, v//vn, v/vt/vn. Only the vertex index is used.
        std::size_t slash = ref.find('/');
        std::string head = slash == std::string::npos ? ref : ref.substr(0, slash);
        int idx = 0;
        try {
          idx = std::stoi(head);
        } catch (...) {
          throw IoError("obj: bad face index at line " + std::to_string(line_no));
        }
        if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
        if (idx < 1 || static_cast<std::size_t>(idx) > mesh.vertices.size()) {
          throw IoError("obj: face index out of range at line " + std::to_string(line_no));
        }
        poly.push_back(idx - 1);
      }
      if (poly.size() < 3) throw IoError("obj: face with fewer than 3 vertices at line " +
                                         std::to_string(line_no));
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
      }
    }
    // vn/vt/usemtl/g/o/s records carry no triangle geometry here.
  }
  return mesh;
}

inline void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  auto out = detail::open_output(path, true);
  for (const auto& v : mesh.vertices) {
    out << "v " << detail::format_double(v.x) << ' ' << detail::format_double(v.y) << ' '
        << detail::format_double(v.z) << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  if (!out) throw IoError("obj: write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Extension-dispatching loaders.
// ---------------------------------------------------------------------------

inline PointCloud load_cloud(const std::filesystem::path& path) {
  std::string ext = detail::lower_extension(path);
  if (ext == ".xyz") return load_xyz(path);
  if (ext == ".ply") {
    auto contents = detail::read_ply(path);
    PointCloud cloud;
    cloud.points = std::move(contents.vertices);
    cloud.normals = std::move(contents.normals);
    return cloud;
  }
  throw IoError("unsupported point cloud extension: " + path.string());
}

inline void save_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  std::string ext = detail::lower_extension(path);
  if (ext == ".xyz") return save_xyz(cloud, path);
  if (ext == ".ply") return save_ply(cloud, path);
  throw IoError("unsupported point cloud extension: " + path.string());
}

inline TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::string ext = detail::lower_extension(path);
  TriangleMesh mesh;
  if (ext == ".obj") {
    mesh = load_obj(path);
  } else if (ext == ".ply") {
    auto contents = detail::read_ply(path);
    mesh.vertices = std::move(contents.vertices);
    mesh.faces = std::move(contents.faces);
  } else {
    throw IoError("unsupported mesh extension: " + path.string());
  }
  for (const auto& f : mesh.faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[2] == f[0]) {
      throw IoError("mesh: face with repeated vertex index in " + path.string());
    }
  }
  return mesh;
}

inline void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::string ext = detail::lower_extension(path);
  if (ext == ".obj") return save_obj(mesh, path);
  if (ext == ".ply") return save_ply(mesh, path);
  throw IoError("unsupported mesh extension: " + path.string());
}

}  // namespace medpu
