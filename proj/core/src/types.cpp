#include "meshrag/types.hpp"

#include <cmath>
#include <string>

namespace meshrag {

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

void PointCloud::validate(double normal_tol) const {
  if (has_normals() && normals.size() != positions.size()) {
    throw Error("point cloud has " + std::to_string(positions.size()) + " positions but " +
                std::to_string(normals.size()) + " normals");
  }
  for (const Vec3& p : positions) {
    if (!is_finite(p)) throw Error("point cloud contains a non-finite coordinate");
  }
  for (const Vec3& n : normals) {
    if (!is_finite(n)) throw Error("point cloud contains a non-finite normal");
    if (std::abs(n.norm() - 1.0) > normal_tol) {
      throw Error("point cloud normal is not unit length");
    }
  }
}

void TriMesh::validate() const {
  for (const Vec3& v : vertices) {
    if (!is_finite(v)) throw Error("mesh contains a non-finite coordinate");
  }
  const int n = static_cast<int>(vertices.size());
  for (const auto& f : faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= n) throw Error("mesh face index out of range");
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      throw Error("mesh contains a degenerate face (repeated vertex index)");
    }
  }
}

AffineTransform AffineTransform::translation(const Vec3& v) {
  AffineTransform t;
  t.m.topRightCorner<3, 1>() = v;
  return t;
}

AffineTransform AffineTransform::scaling(const Vec3& s) {
  AffineTransform t;
  t.m(0, 0) = s.x();
  t.m(1, 1) = s.y();
  t.m(2, 2) = s.z();
  return t;
}

AffineTransform AffineTransform::from_parts(const Mat3& linear, const Vec3& t) {
  AffineTransform out;
  out.m.topLeftCorner<3, 3>() = linear;
  out.m.topRightCorner<3, 1>() = t;
  return out;
}

AffineTransform AffineTransform::inverse() const {
  Eigen::FullPivLU<Mat3> lu(linear());
  if (!lu.isInvertible()) {
    throw SingularTransformError("transform linear block is singular");
  }
  const Mat3 inv = lu.inverse();
  return from_parts(inv, -inv * offset());
}

void AffineTransform::validate() const {
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw Error("transform bottom row is not (0,0,0,1)");
  }
  Eigen::FullPivLU<Mat3> lu(linear());
  if (!lu.isInvertible()) {
    throw SingularTransformError("transform linear block is singular");
  }
}

void SegmentLabels::validate() const {
  std::vector<bool> seen(static_cast<std::size_t>(n_parts) + 1, false);
  for (int v : labels) {
    if (v < 0 || v > n_parts) throw Error("segment label out of range");
    seen[static_cast<std::size_t>(v)] = true;
  }
  for (int id = 1; id <= n_parts; ++id) {
    if (!seen[static_cast<std::size_t>(id)]) {
      throw Error("segment label range is not contiguous: part " + std::to_string(id) +
                  " is empty");
    }
  }
}

}  // namespace meshrag
