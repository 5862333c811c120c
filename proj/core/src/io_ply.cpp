#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "meshrag/errors.hpp"
#include "meshrag/io.hpp"

namespace meshrag {

namespace {

struct PropertySpec {
  std::string type;
  std::string name;
  bool is_list = false;
  std::string list_count_type;
};

struct ElementSpec {
  std::string name;
  long count = 0;
  std::vector<PropertySpec> properties;
};

int scalar_size(const std::string& type) {
  if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
  if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
  if (type == "int" || type == "int32" || type == "uint" || type == "uint32" ||
      type == "float" || type == "float32") {
    return 4;
  }
  if (type == "double" || type == "float64") return 8;
  throw IoError("unknown PLY scalar type: " + type);
}

std::string canonical_type(const std::string& type) {
  if (type == "int8") return "char";
  if (type == "uint8") return "uchar";
  if (type == "int16") return "short";
  if (type == "uint16") return "ushort";
  if (type == "int32") return "int";
  if (type == "uint32") return "uint";
  if (type == "float32") return "float";
  if (type == "float64") return "double";
  return type;
}

double decode_scalar(const unsigned char* p, const std::string& type) {
  if (type == "char") return static_cast<double>(static_cast<std::int8_t>(p[0]));
  if (type == "uchar") return static_cast<double>(p[0]);
  if (type == "short") {
    std::int16_t v;
    std::memcpy(&v, p, 2);
    return v;
  }
  if (type == "ushort") {
    std::uint16_t v;
    std::memcpy(&v, p, 2);
    return v;
  }
  if (type == "int") {
    std::int32_t v;
    std::memcpy(&v, p, 4);
    return v;
  }
  if (type == "uint") {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
  }
  if (type == "float") {
    float v;
    std::memcpy(&v, p, 4);
    return v;
  }
  double v;
  std::memcpy(&v, p, 8);
  return v;
}

void encode_scalar(double value, const std::string& type, std::string& out) {
  char buf[8];
  int size = 0;
  if (type == "char") {
    const auto v = static_cast<std::int8_t>(value);
    std::memcpy(buf, &v, size = 1);
  } else if (type == "uchar") {
    const auto v = static_cast<std::uint8_t>(value);
    std::memcpy(buf, &v, size = 1);
  } else if (type == "short") {
    const auto v = static_cast<std::int16_t>(value);
    std::memcpy(buf, &v, size = 2);
  } else if (type == "ushort") {
    const auto v = static_cast<std::uint16_t>(value);
    std::memcpy(buf, &v, size = 2);
  } else if (type == "int") {
    const auto v = static_cast<std::int32_t>(value);
    std::memcpy(buf, &v, size = 4);
  } else if (type == "uint") {
    const auto v = static_cast<std::uint32_t>(value);
    std::memcpy(buf, &v, size = 4);
  } else if (type == "float") {
    const auto v = static_cast<float>(value);
    std::memcpy(buf, &v, size = 4);
  } else if (type == "double") {
    std::memcpy(buf, &value, size = 8);
  } else {
    throw IoError("unknown PLY scalar type: " + type);
  }
  out.append(buf, size);
}

void format_ascii_scalar(double value, const std::string& type, std::string& out) {
  char buf[40];
  if (type == "float" || type == "double") {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
  } else {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(value));
  }
  out += buf;
}

bool is_integer_type(const std::string& type) {
  return type != "float" && type != "double";
}

}  // namespace

PlyCloud read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw IoError(path + ": not a PLY file");

  bool binary = false;
  bool format_seen = false;
  std::vector<ElementSpec> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "comment" || word == "obj_info" || word.empty()) continue;
    if (word == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw IoError(path + ": unsupported PLY format " + fmt);
      }
      format_seen = true;
    } else if (word == "element") {
      ElementSpec e;
      ls >> e.name >> e.count;
      if (e.count < 0) throw IoError(path + ": negative element count");
      elements.push_back(std::move(e));
    } else if (word == "property") {
      if (elements.empty()) throw IoError(path + ": property before element");
      PropertySpec p;
      std::string first;
      ls >> first;
      if (first == "list") {
        p.is_list = true;
        std::string value_type;
        ls >> p.list_count_type >> value_type >> p.name;
        p.type = canonical_type(value_type);
        p.list_count_type = canonical_type(p.list_count_type);
      } else {
        p.type = canonical_type(first);
        ls >> p.name;
      }
      elements.back().properties.push_back(std::move(p));
    } else if (word == "end_header") {
      break;
    } else {
      throw IoError(path + ": unexpected header line: " + line);
    }
  }
  if (!format_seen) throw IoError(path + ": missing format line");

  PlyCloud result;
  for (const ElementSpec& elem : elements) {
    const bool is_vertex = elem.name == "vertex";

    // Column roles for the vertex element.
    std::map<std::string, int> column;
    std::vector<PlyExtraProperty*> extra_for_column(elem.properties.size(), nullptr);
    if (is_vertex) {
      for (std::size_t c = 0; c < elem.properties.size(); ++c) {
        const PropertySpec& p = elem.properties[c];
        if (p.is_list) continue;
        if (p.name == "x" || p.name == "y" || p.name == "z" || p.name == "nx" ||
            p.name == "ny" || p.name == "nz") {
          column[p.name] = static_cast<int>(c);
        } else {
          result.extras.push_back({p.name, p.type, {}});
          result.extras.back().values.reserve(elem.count);
        }
      }
      // Second pass to wire pointers (the vector above no longer reallocates).
      std::size_t next_extra = 0;
      for (std::size_t c = 0; c < elem.properties.size(); ++c) {
        const PropertySpec& p = elem.properties[c];
        if (p.is_list || column.count(p.name)) continue;
        extra_for_column[c] = &result.extras[next_extra++];
      }
      if (!column.count("x") || !column.count("y") || !column.count("z")) {
        throw IoError(path + ": vertex element lacks x/y/z");
      }
      result.cloud.positions.reserve(elem.count);
      const bool has_normals =
          column.count("nx") && column.count("ny") && column.count("nz");
      if (has_normals) result.cloud.normals.reserve(elem.count);
    }

    std::vector<double> row(elem.properties.size(), 0.0);
    std::string bin_buf;
    for (long r = 0; r < elem.count; ++r) {
      if (binary) {
        for (std::size_t c = 0; c < elem.properties.size(); ++c) {
          const PropertySpec& p = elem.properties[c];
          if (p.is_list) {
            unsigned char count_raw[8];
            const int cs = scalar_size(p.list_count_type);
            if (!in.read(reinterpret_cast<char*>(count_raw), cs)) {
              throw IoError(path + ": truncated binary data");
            }
            const long n = static_cast<long>(decode_scalar(count_raw, p.list_count_type));
            bin_buf.resize(static_cast<std::size_t>(n) * scalar_size(p.type));
            if (n > 0 && !in.read(bin_buf.data(), static_cast<std::streamsize>(bin_buf.size()))) {
              throw IoError(path + ": truncated binary data");
            }
            row[c] = 0.0;
          } else {
            unsigned char raw[8];
            if (!in.read(reinterpret_cast<char*>(raw), scalar_size(p.type))) {
              throw IoError(path + ": truncated binary data");
            }
            row[c] = decode_scalar(raw, p.type);
          }
        }
      } else {
        if (!std::getline(in, line)) throw IoError(path + ": truncated ASCII data");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        for (std::size_t c = 0; c < elem.properties.size(); ++c) {
          const PropertySpec& p = elem.properties[c];
          if (p.is_list) {
            long n = 0;
            if (!(ls >> n)) throw IoError(path + ": bad list count");
            double dummy;
            for (long i = 0; i < n; ++i) {
              if (!(ls >> dummy)) throw IoError(path + ": truncated list");
            }
            row[c] = 0.0;
          } else if (!(ls >> row[c])) {
            throw IoError(path + ": truncated ASCII row");
          }
        }
      }

      if (!is_vertex) continue;
      result.cloud.positions.emplace_back(row[column["x"]], row[column["y"]],
                                          row[column["z"]]);
      if (column.count("nx") && column.count("ny") && column.count("nz")) {
        result.cloud.normals.emplace_back(row[column["nx"]], row[column["ny"]],
                                          row[column["nz"]]);
      }
      for (std::size_t c = 0; c < elem.properties.size(); ++c) {
        if (extra_for_column[c]) extra_for_column[c]->values.push_back(row[c]);
      }
    }
  }
  return result;
}

void write_ply(const std::string& path, const PlyCloud& data, PlyFormat format) {
  const PointCloud& cloud = data.cloud;
  const std::size_t n = cloud.size();
  for (const PlyExtraProperty& e : data.extras) {
    if (e.values.size() != n) {
      throw IoError("PLY extra property '" + e.name + "' has " +
                    std::to_string(e.values.size()) + " values for " +
                    std::to_string(n) + " vertices");
    }
    scalar_size(e.ply_type);
  }
  const bool with_normals = cloud.has_normals();

  std::string out;
  out += "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                    : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(n) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (with_normals) {
    out += "property double nx\nproperty double ny\nproperty double nz\n";
  }
  for (const PlyExtraProperty& e : data.extras) {
    out += "property " + e.ply_type + " " + e.name + "\n";
  }
  out += "end_header\n";

  for (std::size_t i = 0; i < n; ++i) {
    if (format == PlyFormat::Ascii) {
      std::string row;
      for (int a = 0; a < 3; ++a) {
        if (a) row += ' ';
        format_ascii_scalar(cloud.positions[i][a], "double", row);
      }
      if (with_normals) {
        for (int a = 0; a < 3; ++a) {
          row += ' ';
          format_ascii_scalar(cloud.normals[i][a], "double", row);
        }
      }
      for (const PlyExtraProperty& e : data.extras) {
        row += ' ';
        if (is_integer_type(e.ply_type)) {
          format_ascii_scalar(e.values[i], e.ply_type, row);
        } else {
          format_ascii_scalar(e.values[i], "double", row);
        }
      }
      row += '\n';
      out += row;
    } else {
      for (int a = 0; a < 3; ++a) encode_scalar(cloud.positions[i][a], "double", out);
      if (with_normals) {
        for (int a = 0; a < 3; ++a) encode_scalar(cloud.normals[i][a], "double", out);
      }
      for (const PlyExtraProperty& e : data.extras) {
        encode_scalar(e.values[i], e.ply_type, out);
      }
    }
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path);
}

void write_ply(const std::string& path, const PointCloud& cloud, PlyFormat format) {
  write_ply(path, PlyCloud{cloud, {}}, format);
}

PointCloud read_cloud_any(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".obj" || ext == ".OBJ") {
    const TriMesh mesh = read_obj(path);
    PointCloud cloud;
    cloud.positions = mesh.vertices;
    return cloud;
  }
  return read_ply(path).cloud;
}

}  // namespace meshrag
