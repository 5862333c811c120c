#pragma once

#include <cstdint>
#include <vector>

#include "meshrag/types.hpp"

namespace meshrag {

// Exact closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

// Static AABB tree over a mesh's triangles for exact point-to-surface
// distance queries. Immutable after construction; queries are thread-safe.
class TriangleBvh {
 public:
  struct Hit {
    double distance = 0.0;
    int face = -1;
    Vec3 point = Vec3::Zero();
  };

  explicit TriangleBvh(const TriMesh& mesh);

  Hit nearest(const Vec3& q) const;
  double distance(const Vec3& q) const { return nearest(q).distance; }

 private:
  struct Node {
    Vec3 lo, hi;
    int left = -1, right = -1;  // leaf: [left, right) into order_
    bool leaf = false;
  };

  int build(int begin, int end);
  double box_d2(const Node& n, const Vec3& q) const;

  std::vector<std::array<Vec3, 3>> tris_;
  std::vector<Vec3> centroids_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// Symmetric RMS surface-to-surface distance: points sampled on each mesh are
// measured against the other mesh's exact surface, RMS per direction, then
// the two directions averaged. Identical meshes score 0 up to closest-point
// reprojection roundoff (~1e-16).
double mesh_chamfer_l2(const TriMesh& a, const TriMesh& b, int samples = 8192,
                       std::uint64_t seed = 0);

}  // namespace meshrag
