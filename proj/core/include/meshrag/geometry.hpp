#pragma once

#include <span>
#include <utility>

#include "meshrag/types.hpp"

namespace meshrag {

/// Tight axis-aligned bounding box. Throws EmptyGeometryError on zero points.
Aabb compute_aabb(std::span<const Vec3> points);
Aabb compute_aabb(const PointCloud& cloud);
Aabb compute_aabb(const TriMesh& mesh);

/// Maps positions homogeneously; normals by inverse-transpose of the linear
/// block, renormalized. Throws SingularTransformError.
PointCloud apply_transform(const AffineTransform& t, const PointCloud& cloud);
TriMesh apply_transform(const AffineTransform& t, const TriMesh& mesh);

/// Centers the geometry at its AABB center and scales uniformly so the
/// longest AABB side equals 1. Returns the normalized geometry and the
/// transform mapping normalized coordinates back to the original frame.
/// Throws DegenerateExtentError when all three extents are zero.
std::pair<PointCloud, AffineTransform> normalize_geometry(const PointCloud& cloud);
std::pair<TriMesh, AffineTransform> normalize_geometry(const TriMesh& mesh);

}  // namespace meshrag
