#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "meshrag/types.hpp"

namespace meshrag {

// One per-vertex PLY property beyond the positional/normal set. Values are
// held as doubles regardless of the declared type; the declared type is kept
// so a round-trip can re-emit the property unchanged.
struct PlyExtraProperty {
  std::string name;
  std::string ply_type;  // "char", "uchar", "short", "ushort", "int", "uint", "float", "double"
  std::vector<double> values;
};

struct PlyCloud {
  PointCloud cloud;
  std::vector<PlyExtraProperty> extras;
};

enum class PlyFormat { Ascii, BinaryLittleEndian };

// PLY point-cloud I/O. Reads ASCII and binary little-endian files; x, y, z are
// required, nx/ny/nz populate normals when all three are present, and any
// other scalar vertex property lands in extras. Non-vertex elements and list
// properties are skipped. Big-endian files are rejected.
PlyCloud read_ply(const std::string& path);

void write_ply(const std::string& path, const PointCloud& cloud,
               PlyFormat format = PlyFormat::BinaryLittleEndian);
void write_ply(const std::string& path, const PlyCloud& data,
               PlyFormat format = PlyFormat::BinaryLittleEndian);

// OBJ mesh I/O: v/vn/f records, 1-based indices, polygonal faces triangulated
// as fans. The writer emits v and f only.
TriMesh read_obj(const std::string& path);
void write_obj(const std::string& path, const TriMesh& mesh);

// Reads a cloud from .ply, or from .obj by taking mesh vertices (no normals).
PointCloud read_cloud_any(const std::string& path);

}  // namespace meshrag
