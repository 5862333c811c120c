#pragma once

#include <cstdint>
#include <span>

#include "meshrag/types.hpp"

namespace meshrag {

// Oriented bounding box: data-derived PCA axes (columns of `axes`, unit,
// right-handed, sorted by descending variance), half-sizes in `extents`.
struct Obb {
  Vec3 center = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 extents = Vec3::Zero();

  double volume() const { return 8.0 * extents.x() * extents.y() * extents.z(); }
  bool contains(const Vec3& p, double slack = 0.0) const;
};

Obb compute_obb(std::span<const Vec3> points);

// Monte-Carlo intersection-over-union of two OBBs. `samples` points are drawn
// from a shared seeded stream and mapped into both boxes, so the estimate is
// exactly symmetric in (a, b). Degenerate (zero) extents are inflated by a
// relative epsilon so coplanar identical boxes rate as IoU 1.
double obb_iou(const Obb& a, const Obb& b, int samples = 4096,
               std::uint64_t seed = 0x51ab5eed);

}  // namespace meshrag
