#include "corrvote/ply.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace corrvote {

namespace {

enum class ScalarType { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::kI8:
    case ScalarType::kU8:
      return 1;
    case ScalarType::kI16:
    case ScalarType::kU16:
      return 2;
    case ScalarType::kI32:
    case ScalarType::kU32:
    case ScalarType::kF32:
      return 4;
    case ScalarType::kF64:
      return 8;
  }
  return 0;
}

bool parse_scalar_type(const std::string& name, ScalarType& out) {
  if (name == "char" || name == "int8") out = ScalarType::kI8;
  else if (name == "uchar" || name == "uint8") out = ScalarType::kU8;
  else if (name == "short" || name == "int16") out = ScalarType::kI16;
  else if (name == "ushort" || name == "uint16") out = ScalarType::kU16;
  else if (name == "int" || name == "int32") out = ScalarType::kI32;
  else if (name == "uint" || name == "uint32") out = ScalarType::kU32;
  else if (name == "float" || name == "float32") out = ScalarType::kF32;
  else if (name == "double" || name == "float64") out = ScalarType::kF64;
  else return false;
  return true;
}

bool is_float_type(ScalarType t) {
  return t == ScalarType::kF32 || t == ScalarType::kF64;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kF32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kU8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

double read_binary_scalar(std::istream& in, ScalarType t) {
  char buf[8];
  in.read(buf, static_cast<std::streamsize>(scalar_size(t)));
  switch (t) {
    case ScalarType::kI8: {
      std::int8_t v; std::memcpy(&v, buf, 1); return static_cast<double>(v);
    }
    case ScalarType::kU8: {
      std::uint8_t v; std::memcpy(&v, buf, 1); return static_cast<double>(v);
    }
    case ScalarType::kI16: {
      std::int16_t v; std::memcpy(&v, buf, 2); return static_cast<double>(v);
    }
    case ScalarType::kU16: {
      std::uint16_t v; std::memcpy(&v, buf, 2); return static_cast<double>(v);
    }
    case ScalarType::kI32: {
      std::int32_t v; std::memcpy(&v, buf, 4); return static_cast<double>(v);
    }
    case ScalarType::kU32: {
      std::uint32_t v; std::memcpy(&v, buf, 4); return static_cast<double>(v);
    }
    case ScalarType::kF32: {
      float v; std::memcpy(&v, buf, 4); return static_cast<double>(v);
    }
    case ScalarType::kF64: {
      double v; std::memcpy(&v, buf, 8); return v;
    }
  }
  return 0.0;
}

double read_ascii_scalar(std::istream& in) {
  double v = 0.0;
  if (!(in >> v)) {
    throw std::runtime_error("PLY body: expected a numeric token");
  }
  return v;
}

struct VertexLayout {
  // Property slot -> which coordinate it feeds; -1 means skip.
  // 0..2 = x,y,z; 3..5 = nx,ny,nz.
  std::vector<int> roles;
  bool has_normals = false;
};

VertexLayout make_vertex_layout(const Element& vertex, std::size_t header_end_line) {
  VertexLayout layout;
  layout.roles.assign(vertex.properties.size(), -1);
  int found[6] = {0, 0, 0, 0, 0, 0};
  static const char* names[6] = {"x", "y", "z", "nx", "ny", "nz"};
  for (std::size_t i = 0; i < vertex.properties.size(); ++i) {
    const Property& p = vertex.properties[i];
    if (p.is_list) continue;
    for (int r = 0; r < 6; ++r) {
      if (p.name == names[r]) {
        if (!is_float_type(p.type)) {
          if (r < 3) {
            throw PlyParseError("vertex property '" + p.name +
                                    "' must be float32 or float64",
                                header_end_line);
          }
          break;  // integer-typed normal: treat as unknown property
        }
        layout.roles[i] = r;
        found[r] = 1;
        break;
      }
    }
  }
  for (int r = 0; r < 3; ++r) {
    if (!found[r]) {
      throw PlyParseError(std::string("vertex element is missing property '") +
                              names[r] + "'",
                          header_end_line);
    }
  }
  layout.has_normals = found[3] && found[4] && found[5];
  return layout;
}

}  // namespace

PointCloud read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open PLY file: " + path);
  }

  std::size_t line_no = 0;
  auto next_line = [&](std::string& line) {
    if (!std::getline(in, line)) {
      throw PlyParseError("unexpected end of header", line_no + 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  std::string line;
  next_line(line);
  if (line != "ply") {
    throw PlyParseError("file does not start with 'ply'", line_no);
  }

  bool format_seen = false;
  PlyFormat format = PlyFormat::kAscii;
  std::vector<Element> elements;

  for (;;) {
    next_line(line);
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") {
      continue;
    }
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        format = PlyFormat::kAscii;
      } else if (fmt == "binary_little_endian") {
        format = PlyFormat::kBinaryLittleEndian;
      } else if (fmt == "binary_big_endian") {
        throw PlyParseError("binary_big_endian is not supported", line_no);
      } else {
        throw PlyParseError("unknown format '" + fmt + "'", line_no);
      }
      format_seen = true;
    } else if (keyword == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0 || ls.fail()) {
        throw PlyParseError("malformed element declaration", line_no);
      }
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) {
        throw PlyParseError("property declared before any element", line_no);
      }
      Property p;
      std::string first;
      ls >> first;
      if (first == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        if (!parse_scalar_type(count_type, p.count_type) ||
            !parse_scalar_type(item_type, p.type) || p.name.empty()) {
          throw PlyParseError("malformed list property", line_no);
        }
        p.is_list = true;
      } else {
        ls >> p.name;
        if (!parse_scalar_type(first, p.type) || p.name.empty()) {
          throw PlyParseError("malformed property declaration", line_no);
        }
      }
      elements.back().properties.push_back(std::move(p));
    } else if (keyword == "end_header") {
      break;
    } else {
      throw PlyParseError("unknown header keyword '" + keyword + "'", line_no);
    }
  }

  if (!format_seen) {
    throw PlyParseError("header has no format declaration", line_no);
  }

  const Element* vertex = nullptr;
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      vertex = &e;
      break;
    }
  }
  if (vertex == nullptr) {
    throw PlyParseError("header declares no vertex element", line_no);
  }
  const VertexLayout layout = make_vertex_layout(*vertex, line_no);

  std::vector<Point3> points;
  std::vector<Vec3> normals;
  points.reserve(vertex->count);
  if (layout.has_normals) normals.reserve(vertex->count);

  for (const auto& e : elements) {
    const bool is_vertex = (&e == vertex);
    for (std::size_t row = 0; row < e.count; ++row) {
      double coords[6] = {0, 0, 0, 0, 0, 0};
      for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
        const Property& p = e.properties[pi];
        if (p.is_list) {
          double count_value;
          if (format == PlyFormat::kAscii) {
            count_value = read_ascii_scalar(in);
            for (long long j = 0; j < static_cast<long long>(count_value); ++j) {
              read_ascii_scalar(in);
            }
          } else {
            count_value = read_binary_scalar(in, p.count_type);
            in.seekg(static_cast<std::streamoff>(static_cast<std::size_t>(count_value) *
                                                 scalar_size(p.type)),
                     std::ios::cur);
          }
          continue;
        }
        const double v = format == PlyFormat::kAscii ? read_ascii_scalar(in)
                                                     : read_binary_scalar(in, p.type);
        if (is_vertex) {
          const int role = layout.roles[pi];
          if (role >= 0) coords[role] = v;
        }
      }
      if (!in) {
        throw std::runtime_error("PLY body ends early in element '" + e.name +
                                 "' at row " + std::to_string(row));
      }
      if (is_vertex) {
        for (int r = 0; r < 3; ++r) {
          if (!std::isfinite(coords[r])) {
            throw std::runtime_error("non-finite coordinate at vertex " +
                                     std::to_string(row));
          }
        }
        points.emplace_back(coords[0], coords[1], coords[2]);
        if (layout.has_normals) normals.emplace_back(coords[3], coords[4], coords[5]);
      }
    }
  }

  if (!layout.has_normals) {
    return PointCloud(std::move(points));
  }
  std::vector<char> reliable(points.size(), 1);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const double n = normals[i].norm();
    if (n < 1e-12 || !std::isfinite(n)) {
      normals[i] = Vec3(0, 0, 1);
      reliable[i] = 0;
    } else {
      normals[i] /= n;
    }
  }
  return PointCloud(std::move(points), std::move(normals), std::move(reliable));
}

void write_ply(const std::string& path, const PointCloud& cloud, PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open PLY file for writing: " + path);
  }

  const bool with_normals = cloud.has_normals();
  out << "ply\n";
  out << (format == PlyFormat::kAscii ? "format ascii 1.0\n"
                                      : "format binary_little_endian 1.0\n");
  out << "element vertex " << cloud.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (with_normals) {
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  }
  out << "end_header\n";

  if (format == PlyFormat::kAscii) {
    out.precision(17);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point3& p = cloud.point(i);
      out << p.x() << " " << p.y() << " " << p.z();
      if (with_normals) {
        const Vec3& n = cloud.normal(i);
        out << " " << n.x() << " " << n.y() << " " << n.z();
      }
      out << "\n";
    }
  } else {
    auto put = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point3& p = cloud.point(i);
      put(p.x());
      put(p.y());
      put(p.z());
      if (with_normals) {
        const Vec3& n = cloud.normal(i);
        put(n.x());
        put(n.y());
        put(n.z());
      }
    }
  }
  if (!out) {
    throw std::runtime_error("failed writing PLY file: " + path);
  }
}

}  // namespace corrvote
