#include "meshrag/obb.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "meshrag/errors.hpp"
#include "meshrag/rng.hpp"

namespace meshrag {

bool Obb::contains(const Vec3& p, double slack) const {
  const Vec3 local = axes.transpose() * (p - center);
  return std::abs(local.x()) <= extents.x() + slack &&
         std::abs(local.y()) <= extents.y() + slack &&
         std::abs(local.z()) <= extents.z() + slack;
}

Obb compute_obb(std::span<const Vec3> points) {
  if (points.empty()) throw EmptyGeometryError("compute_obb on an empty point set");

  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  // Eigen returns ascending eigenvalues; reorder to descending variance.
  Mat3 axes;
  axes.col(0) = eig.eigenvectors().col(2);
  axes.col(1) = eig.eigenvectors().col(1);
  axes.col(2) = eig.eigenvectors().col(0);
  if (axes.determinant() < 0.0) axes.col(2) = -axes.col(2);

  Vec3 lo = axes.transpose() * (points[0] - mean);
  Vec3 hi = lo;
  for (const Vec3& p : points) {
    const Vec3 local = axes.transpose() * (p - mean);
    lo = lo.cwiseMin(local);
    hi = hi.cwiseMax(local);
  }

  Obb obb;
  obb.axes = axes;
  obb.extents = 0.5 * (hi - lo);
  obb.center = mean + axes * (0.5 * (hi + lo));
  return obb;
}

namespace {

Vec3 inflated_extents(const Obb& box, double floor_scale) {
  const double longest = box.extents.maxCoeff();
  const double eps = std::max(longest, floor_scale) * 1e-6;
  return box.extents.cwiseMax(Vec3::Constant(eps));
}

}  // namespace

double obb_iou(const Obb& a, const Obb& b, int samples, std::uint64_t seed) {
  const double scene = std::max({(a.center - b.center).norm(),
                                 a.extents.maxCoeff(), b.extents.maxCoeff(), 1e-12});
  const Vec3 ea = inflated_extents(a, scene);
  const Vec3 eb = inflated_extents(b, scene);
  const double vol_a = 8.0 * ea.prod();
  const double vol_b = 8.0 * eb.prod();

  // One stream of unit-box coordinates, reused for both boxes: the estimator
  // is bitwise symmetric under swapping a and b.
  Obb a_inf = a;
  a_inf.extents = ea;
  Obb b_inf = b;
  b_inf.extents = eb;

  const int per_box = std::max(1, samples / 2);
  Rng rng(seed);
  long in_b_of_a = 0;
  long in_a_of_b = 0;
  for (int i = 0; i < per_box; ++i) {
    const Vec3 unit(2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0,
                    2.0 * rng.uniform01() - 1.0);
    const Vec3 pa = a.center + a.axes * unit.cwiseProduct(ea);
    const Vec3 pb = b.center + b.axes * unit.cwiseProduct(eb);
    if (b_inf.contains(pa)) ++in_b_of_a;
    if (a_inf.contains(pb)) ++in_a_of_b;
  }

  const double inter = 0.5 * (vol_a * in_b_of_a + vol_b * in_a_of_b) /
                       static_cast<double>(per_box);
  const double uni = vol_a + vol_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace meshrag
