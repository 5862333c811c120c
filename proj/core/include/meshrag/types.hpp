#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "meshrag/errors.hpp"

namespace meshrag {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Point positions with optional unit normals. The universal exchange
/// representation between segmentation, generation, and registration.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;  // empty, or one unit vector per position

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_normals() const { return !normals.empty(); }

  /// Throws if sizes mismatch, coordinates are non-finite, or a normal
  /// is not unit length within `normal_tol`.
  void validate(double normal_tol = 1e-6) const;
};

/// Indexed triangle mesh.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  bool empty() const { return vertices.empty(); }

  /// Throws if a face index is out of range, a face repeats a vertex
  /// index, or a coordinate is non-finite.
  void validate() const;
};

/// Axis-aligned bounding box stored as center + full extents.
struct Aabb {
  Vec3 center{Vec3::Zero()};
  Vec3 extents{Vec3::Zero()};  // full dimensions (w, h, d), componentwise >= 0

  Vec3 min() const { return center - 0.5 * extents; }
  Vec3 max() const { return center + 0.5 * extents; }
  double diagonal() const { return extents.norm(); }
  double longest_extent() const { return extents.maxCoeff(); }

  static Aabb from_min_max(const Vec3& lo, const Vec3& hi) {
    return Aabb{0.5 * (lo + hi), hi - lo};
  }
};

/// 4x4 homogeneous transform, bottom row pinned to (0,0,0,1).
struct AffineTransform {
  Mat4 m{Mat4::Identity()};

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(const Vec3& v);
  static AffineTransform scaling(const Vec3& s);
  static AffineTransform from_parts(const Mat3& linear, const Vec3& t);

  Mat3 linear() const { return m.topLeftCorner<3, 3>(); }
  Vec3 offset() const { return m.topRightCorner<3, 1>(); }

  Vec3 apply(const Vec3& p) const {
    return m.topLeftCorner<3, 3>() * p + m.topRightCorner<3, 1>();
  }

  /// Exact inverse; throws SingularTransformError.
  AffineTransform inverse() const;

  /// Throws if the bottom row deviates from (0,0,0,1) or the linear
  /// block is singular.
  void validate() const;

  friend AffineTransform operator*(const AffineTransform& a, const AffineTransform& b) {
    AffineTransform out;
    out.m = a.m * b.m;
    return out;
  }
};

/// Per-point part labels. 0 is reserved for "unassigned"; assigned parts
/// use the contiguous range 1..n_parts.
struct SegmentLabels {
  std::vector<int> labels;
  int n_parts = 0;

  void validate() const;
};

bool is_finite(const Vec3& v);

}  // namespace meshrag
