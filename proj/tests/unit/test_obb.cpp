#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "meshrag/geometry.hpp"
#include "meshrag/meshdist.hpp"
#include "meshrag/obb.hpp"
#include "meshrag/rng.hpp"
#include "meshrag/sampling.hpp"
#include "test_support.hpp"

using namespace meshrag;
using namespace meshrag::testing;

namespace {

// Dense axis-aligned box cloud: corners plus seeded interior fill so the PCA
// axes line up with the coordinate axes.
std::vector<Vec3> box_cloud(const Vec3& center, const Vec3& half, std::uint64_t seed,
                            int n = 600) {
  std::vector<Vec3> points;
  for (int i = 0; i < 8; ++i) {
    points.push_back(center + Vec3(i & 1 ? half.x() : -half.x(),
                                   i & 2 ? half.y() : -half.y(),
                                   i & 4 ? half.z() : -half.z()));
  }
  Rng rng(seed);
  for (int i = 8; i < n; ++i) {
    points.push_back(center + Vec3(rng.uniform(-half.x(), half.x()),
                                   rng.uniform(-half.y(), half.y()),
                                   rng.uniform(-half.z(), half.z())));
  }
  return points;
}

Obb axis_aligned_obb(const Vec3& center, const Vec3& half) {
  Obb box;
  box.center = center;
  // Axes must be variance-ordered: descending half extent.
  std::vector<std::pair<double, int>> order = {
      {half.x(), 0}, {half.y(), 1}, {half.z(), 2}};
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  Mat3 axes = Mat3::Zero();
  Vec3 extents;
  for (int col = 0; col < 3; ++col) {
    axes(order[col].second, col) = 1.0;
    extents[col] = order[col].first;
  }
  if (axes.determinant() < 0) axes.col(2) *= -1.0;
  box.axes = axes;
  box.extents = extents;
  return box;
}

}  // namespace

TEST_CASE("pca obb recovers an axis-aligned box") {
  const Vec3 half(1.0, 0.5, 0.25);
  const Obb box = compute_obb(box_cloud(Vec3(2, -1, 3), half, 7, 4000));
  CHECK((box.center - Vec3(2, -1, 3)).norm() < 0.05);
  // Descending-variance order puts x first, then y, then z.
  CHECK(std::abs(std::abs(box.axes.col(0).x()) - 1.0) < 1e-2);
  CHECK(std::abs(std::abs(box.axes.col(1).y()) - 1.0) < 1e-2);
  CHECK(std::abs(std::abs(box.axes.col(2).z()) - 1.0) < 1e-2);
  CHECK(box.extents.x() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(box.extents.y() == doctest::Approx(0.5).epsilon(0.05));
  CHECK(box.extents.z() == doctest::Approx(0.25).epsilon(0.05));
  CHECK(box.axes.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("obb axes stay orthonormal and right-handed on skewed data") {
  const PointCloud cloud = random_cloud(500, 12, false);
  std::vector<Vec3> stretched;
  for (const Vec3& p : cloud.positions) {
    stretched.emplace_back(3.0 * p.x() + p.y(), 0.5 * p.y(), 0.1 * p.z() + 0.2 * p.x());
  }
  const Obb box = compute_obb(stretched);
  CHECK((box.axes.transpose() * box.axes - Mat3::Identity()).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK(box.axes.determinant() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(box.extents.x() >= box.extents.y());
  CHECK(box.extents.y() >= box.extents.z());
}

TEST_CASE("identical boxes rate iou one") {
  const Obb box = axis_aligned_obb(Vec3(1, 2, 3), Vec3(0.5, 0.4, 0.3));
  CHECK(obb_iou(box, box) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("disjoint boxes rate iou zero") {
  const Obb a = axis_aligned_obb(Vec3::Zero(), Vec3(0.5, 0.5, 0.5));
  const Obb b = axis_aligned_obb(Vec3(10, 0, 0), Vec3(0.5, 0.5, 0.5));
  CHECK(obb_iou(a, b) == 0.0);
}

TEST_CASE("half-overlapping unit boxes rate iou one third") {
  // Unit cubes offset by half an edge: intersection 0.5, union 1.5.
  const Obb a = axis_aligned_obb(Vec3(0.5, 0.5, 0.5), Vec3(0.5, 0.5, 0.5));
  const Obb b = axis_aligned_obb(Vec3(1.0, 0.5, 0.5), Vec3(0.5, 0.5, 0.5));
  const double iou = obb_iou(a, b);
  CHECK(std::abs(iou - 1.0 / 3.0) < 0.02);
}

TEST_CASE("monte-carlo iou tracks the analytic value on random boxes") {
  Rng rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const Vec3 ca(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    const Vec3 cb(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    const Vec3 ha(rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8));
    const Vec3 hb(rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8));
    const double got = obb_iou(axis_aligned_obb(ca, ha), axis_aligned_obb(cb, hb));
    const double want = analytic_box_iou(ca, ha, cb, hb);
    CHECK(std::abs(got - want) < 0.02);
  }
}

TEST_CASE("obb iou is symmetric and deterministic") {
  const Obb a = axis_aligned_obb(Vec3(0.1, 0, 0), Vec3(0.6, 0.5, 0.4));
  const Obb b = axis_aligned_obb(Vec3(0.5, 0.2, 0.1), Vec3(0.5, 0.6, 0.3));
  CHECK(obb_iou(a, b) == obb_iou(b, a));
  CHECK(obb_iou(a, b) == obb_iou(a, b));
}

TEST_CASE("flat boxes still produce a sane iou") {
  // Coplanar identical rectangles: inflated-epsilon handling must give ~1.
  const Obb flat = axis_aligned_obb(Vec3::Zero(), Vec3(0.5, 0.4, 0.0));
  CHECK(obb_iou(flat, flat) > 0.95);
  const Obb other = axis_aligned_obb(Vec3(5, 0, 0), Vec3(0.5, 0.4, 0.0));
  CHECK(obb_iou(flat, other) == 0.0);
}

TEST_CASE("closest point on triangle covers all regions") {
  const Vec3 a(0, 0, 0), b(2, 0, 0), c(0, 2, 0);
  // Interior projection.
  CHECK((closest_point_on_triangle(Vec3(0.5, 0.5, 3), a, b, c) - Vec3(0.5, 0.5, 0))
            .norm() < 1e-12);
  // Vertex region.
  CHECK((closest_point_on_triangle(Vec3(-1, -1, 0), a, b, c) - a).norm() < 1e-12);
  CHECK((closest_point_on_triangle(Vec3(3, -1, 0), a, b, c) - b).norm() < 1e-12);
  // Edge regions.
  CHECK((closest_point_on_triangle(Vec3(1, -2, 0), a, b, c) - Vec3(1, 0, 0)).norm() <
        1e-12);
  CHECK((closest_point_on_triangle(Vec3(2, 2, 0), a, b, c) - Vec3(1, 1, 0)).norm() <
        1e-12);
}

TEST_CASE("bvh distances equal brute force over all faces") {
  const TriMesh mesh = make_bumpy_sphere(Vec3(0.2, -0.1, 0.3), 0.7, 0.05, 3, 10, 14);
  const TriangleBvh bvh(mesh);
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec3 q(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    double want = std::numeric_limits<double>::infinity();
    for (const auto& f : mesh.faces) {
      const Vec3 p = closest_point_on_triangle(q, mesh.vertices[f[0]],
                                               mesh.vertices[f[1]], mesh.vertices[f[2]]);
      want = std::min(want, (p - q).norm());
    }
    CHECK(bvh.distance(q) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("mesh chamfer of a mesh with itself is reprojection noise") {
  const TriMesh mesh = make_blob(5);
  CHECK(mesh_chamfer_l2(mesh, mesh, 2048, 9) <= 1e-12);
}

TEST_CASE("mesh chamfer sees a known offset") {
  const TriMesh a = make_box(Vec3::Zero(), Vec3(0.5, 0.5, 0.5));
  TriMesh b = a;
  for (auto& v : b.vertices) v.x() += 0.01;
  const double cd = mesh_chamfer_l2(a, b, 4096, 1);
  // Faces normal to x sit 0.01 apart; the four tangential faces nearly touch.
  CHECK(cd > 0.5 * 0.01 * std::sqrt(2.0 / 6.0));
  CHECK(cd < 0.01);
}
