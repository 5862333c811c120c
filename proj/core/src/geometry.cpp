#include "meshrag/geometry.hpp"

#include <Eigen/LU>

#include <limits>

namespace meshrag {

Aabb compute_aabb(std::span<const Vec3> points) {
  if (points.empty()) throw EmptyGeometryError("cannot compute AABB of zero points");
  Vec3 lo = points[0];
  Vec3 hi = points[0];
  for (const Vec3& p : points.subspan(1)) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return Aabb::from_min_max(lo, hi);
}

Aabb compute_aabb(const PointCloud& cloud) {
  return compute_aabb(std::span<const Vec3>(cloud.positions));
}

Aabb compute_aabb(const TriMesh& mesh) {
  return compute_aabb(std::span<const Vec3>(mesh.vertices));
}

namespace {

Mat3 normal_matrix(const AffineTransform& t) {
  Eigen::FullPivLU<Mat3> lu(t.linear());
  if (!lu.isInvertible()) {
    throw SingularTransformError("cannot transform geometry: linear block is singular");
  }
  return lu.inverse().transpose();
}

}  // namespace

PointCloud apply_transform(const AffineTransform& t, const PointCloud& cloud) {
  PointCloud out;
  out.positions.reserve(cloud.positions.size());
  for (const Vec3& p : cloud.positions) out.positions.push_back(t.apply(p));
  if (cloud.has_normals()) {
    const Mat3 nm = normal_matrix(t);
    out.normals.reserve(cloud.normals.size());
    for (const Vec3& n : cloud.normals) out.normals.push_back((nm * n).normalized());
  }
  return out;
}

TriMesh apply_transform(const AffineTransform& t, const TriMesh& mesh) {
  normal_matrix(t);  // singularity check even for meshes
  TriMesh out;
  out.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) out.vertices.push_back(t.apply(v));
  out.faces = mesh.faces;
  return out;
}

namespace {

// Shared implementation: returns (forward transform, inverse transform).
std::pair<AffineTransform, AffineTransform> normalization_transforms(const Aabb& box) {
  const double longest = box.longest_extent();
  if (longest <= 0.0) {
    throw DegenerateExtentError("cannot normalize geometry with all extents zero");
  }
  const AffineTransform forward = AffineTransform::scaling(Vec3::Constant(1.0 / longest)) *
                                  AffineTransform::translation(-box.center);
  const AffineTransform inverse = AffineTransform::translation(box.center) *
                                  AffineTransform::scaling(Vec3::Constant(longest));
  return {forward, inverse};
}

}  // namespace

std::pair<PointCloud, AffineTransform> normalize_geometry(const PointCloud& cloud) {
  const auto [forward, inverse] = normalization_transforms(compute_aabb(cloud));
  return {apply_transform(forward, cloud), inverse};
}

std::pair<TriMesh, AffineTransform> normalize_geometry(const TriMesh& mesh) {
  const auto [forward, inverse] = normalization_transforms(compute_aabb(mesh));
  return {apply_transform(forward, mesh), inverse};
}

}  // namespace meshrag
