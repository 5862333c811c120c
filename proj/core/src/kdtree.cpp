#include "meshrag/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace meshrag {

namespace {
constexpr int kLeafSize = 16;

struct Best {
  double d2 = std::numeric_limits<double>::infinity();
  int index = std::numeric_limits<int>::max();

  bool improves(double d2_new, int idx) const {
    return d2_new < d2 || (d2_new == d2 && idx < index);
  }
};
}  // namespace

NeighborIndex::NeighborIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<int>(points_.size()));
  }
}

NeighborIndex::NeighborIndex(const PointCloud& cloud) : NeighborIndex(cloud.positions) {}

int NeighborIndex::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].left = begin;
    nodes_[id].right = end;
    return id;
  }
  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  Node node;
  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  nodes_[id] = node;
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

NeighborIndex::Hit NeighborIndex::nearest(const Vec3& q) const {
  if (empty()) throw EmptyGeometryError("nearest-neighbor query on an empty index");
  Best best;
  // Iterative depth-first search with a manual stack; near child first.
  std::vector<std::pair<int, double>> stack;
  stack.emplace_back(root_, 0.0);
  while (!stack.empty()) {
    const auto [id, plane_d2] = stack.back();
    stack.pop_back();
    if (plane_d2 > best.d2) continue;
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.left; i < node.right; ++i) {
        const int idx = order_[i];
        const double d2 = (points_[idx] - q).squaredNorm();
        if (best.improves(d2, idx)) best = {d2, idx};
      }
      continue;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    stack.emplace_back(far, delta * delta);
    stack.emplace_back(near, 0.0);
  }
  return {best.index, std::sqrt(best.d2)};
}

std::optional<NeighborIndex::Hit> NeighborIndex::nearest_within(const Vec3& q,
                                                                double max_distance) const {
  const Hit hit = nearest(q);
  if (hit.distance <= max_distance) return hit;
  return std::nullopt;
}

std::vector<NeighborIndex::Hit> NeighborIndex::knn(const Vec3& q, int k) const {
  if (empty()) throw EmptyGeometryError("knn query on an empty index");
  k = std::min<int>(k, static_cast<int>(points_.size()));
  if (k <= 0) return {};

  // Bounded max-heap keyed by (d2, index); the root is the current worst.
  using Entry = std::pair<double, int>;
  std::vector<Entry> heap;
  heap.reserve(static_cast<std::size_t>(k));
  auto worse = [](const Entry& a, const Entry& b) { return a < b; };

  std::vector<std::pair<int, double>> stack;
  stack.emplace_back(root_, 0.0);
  while (!stack.empty()) {
    const auto [id, plane_d2] = stack.back();
    stack.pop_back();
    if (static_cast<int>(heap.size()) == k &&
        std::make_pair(plane_d2, -1) > heap.front()) {
      continue;
    }
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.left; i < node.right; ++i) {
        const int idx = order_[i];
        const Entry e{(points_[idx] - q).squaredNorm(), idx};
        if (static_cast<int>(heap.size()) < k) {
          heap.push_back(e);
          std::push_heap(heap.begin(), heap.end(), worse);
        } else if (e < heap.front()) {
          std::pop_heap(heap.begin(), heap.end(), worse);
          heap.back() = e;
          std::push_heap(heap.begin(), heap.end(), worse);
        }
      }
      continue;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    stack.emplace_back(far, delta * delta);
    stack.emplace_back(near, 0.0);
  }

  std::sort(heap.begin(), heap.end());
  std::vector<Hit> out;
  out.reserve(heap.size());
  for (const auto& [d2, idx] : heap) out.push_back({idx, std::sqrt(d2)});
  return out;
}

}  // namespace meshrag
