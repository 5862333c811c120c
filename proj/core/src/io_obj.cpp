#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "meshrag/errors.hpp"
#include "meshrag/io.hpp"

namespace meshrag {

namespace {

// "7", "7/2", "7//3", "7/2/3" -> vertex index 7. Negative indices count from
// the end per the OBJ spec.
int parse_face_vertex(const std::string& token, int vertex_count,
                      const std::string& path) {
  std::size_t slash = token.find('/');
  const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  int idx = 0;
  try {
    idx = std::stoi(head);
  } catch (...) {
    throw IoError(path + ": bad face index '" + token + "'");
  }
  if (idx < 0) idx = vertex_count + idx + 1;
  if (idx < 1 || idx > vertex_count) {
    throw IoError(path + ": face index out of range: " + token);
  }
  return idx - 1;
}

}  // namespace

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  TriMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw IoError(path + ": bad vertex line: " + line);
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ls >> token) {
        poly.push_back(parse_face_vertex(token, static_cast<int>(mesh.vertices.size()), path));
      }
      if (poly.size() < 3) throw IoError(path + ": face with fewer than 3 vertices");
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
      }
    }
    // vn, vt, usemtl, o, g, s, mtllib, comments: ignored.
  }
  return mesh;
}

void write_obj(const std::string& path, const TriMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out += buf;
  }
  for (const auto& [i, j, k] : mesh.faces) {
    std::snprintf(buf, sizeof(buf), "f %d %d %d\n", i + 1, j + 1, k + 1);
    out += buf;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace meshrag
