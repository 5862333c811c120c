#include "meshrag/meshdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshrag/errors.hpp"
#include "meshrag/sampling.hpp"

namespace meshrag {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + v * ab + w * ac;
}

namespace {
constexpr int kLeafTris = 4;
}

TriangleBvh::TriangleBvh(const TriMesh& mesh) {
  if (mesh.empty()) throw EmptyGeometryError("TriangleBvh over an empty mesh");
  tris_.reserve(mesh.faces.size());
  centroids_.reserve(mesh.faces.size());
  for (const auto& [i, j, k] : mesh.faces) {
    tris_.push_back({mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]});
    centroids_.push_back((mesh.vertices[i] + mesh.vertices[j] + mesh.vertices[k]) / 3.0);
  }
  order_.resize(tris_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * tris_.size() / kLeafTris + 2);
  root_ = build(0, static_cast<int>(tris_.size()));
}

int TriangleBvh::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    for (const Vec3& v : tris_[order_[i]]) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  nodes_[id].lo = lo;
  nodes_[id].hi = hi;

  if (end - begin <= kLeafTris) {
    nodes_[id].leaf = true;
    nodes_[id].left = begin;
    nodes_[id].right = end;
    return id;
  }

  Vec3 clo = centroids_[order_[begin]];
  Vec3 chi = clo;
  for (int i = begin + 1; i < end; ++i) {
    clo = clo.cwiseMin(centroids_[order_[i]]);
    chi = chi.cwiseMax(centroids_[order_[i]]);
  }
  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return centroids_[a][axis] < centroids_[b][axis]; });

  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double TriangleBvh::box_d2(const Node& n, const Vec3& q) const {
  const Vec3 clamped = q.cwiseMax(n.lo).cwiseMin(n.hi);
  return (q - clamped).squaredNorm();
}

TriangleBvh::Hit TriangleBvh::nearest(const Vec3& q) const {
  Hit best;
  best.distance = std::numeric_limits<double>::infinity();
  double best_d2 = std::numeric_limits<double>::infinity();

  std::vector<std::pair<double, int>> stack;
  stack.emplace_back(0.0, root_);
  while (!stack.empty()) {
    const auto [bound, id] = stack.back();
    stack.pop_back();
    if (bound > best_d2) continue;
    const Node& node = nodes_[id];
    if (node.leaf) {
      for (int i = node.left; i < node.right; ++i) {
        const int face = order_[i];
        const auto& t = tris_[face];
        const Vec3 cp = closest_point_on_triangle(q, t[0], t[1], t[2]);
        const double d2 = (q - cp).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best.face = face;
          best.point = cp;
        }
      }
      continue;
    }
    const double dl = box_d2(nodes_[node.left], q);
    const double dr = box_d2(nodes_[node.right], q);
    // Push the farther child first so the nearer is explored next.
    if (dl <= dr) {
      stack.emplace_back(dr, node.right);
      stack.emplace_back(dl, node.left);
    } else {
      stack.emplace_back(dl, node.left);
      stack.emplace_back(dr, node.right);
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

double mesh_chamfer_l2(const TriMesh& a, const TriMesh& b, int samples,
                       std::uint64_t seed) {
  const PointCloud pa = sample_surface(a, samples, seed);
  const PointCloud pb = sample_surface(b, samples, seed);
  const TriangleBvh bvh_a(a);
  const TriangleBvh bvh_b(b);

  double acc_ab = 0.0;
  for (const Vec3& p : pa.positions) {
    const double d = bvh_b.distance(p);
    acc_ab += d * d;
  }
  double acc_ba = 0.0;
  for (const Vec3& p : pb.positions) {
    const double d = bvh_a.distance(p);
    acc_ba += d * d;
  }
  const double rms_ab = std::sqrt(acc_ab / static_cast<double>(pa.size()));
  const double rms_ba = std::sqrt(acc_ba / static_cast<double>(pb.size()));
  return 0.5 * (rms_ab + rms_ba);
}

}  // namespace meshrag
