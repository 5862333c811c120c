#pragma once

#include <optional>
#include <vector>

#include "meshrag/types.hpp"

namespace meshrag {

/// Exact nearest-neighbor index over a fixed point set. Immutable after
/// construction; queries are const and safe to run concurrently.
///
/// Ties on distance resolve to the lowest point index, so query results
/// match a first-wins linear scan exactly.
class NeighborIndex {
 public:
  struct Hit {
    int index = -1;
    double distance = 0.0;
  };

  NeighborIndex() = default;
  explicit NeighborIndex(std::vector<Vec3> points);
  explicit NeighborIndex(const PointCloud& cloud);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }

  /// Nearest point to `q`. Throws EmptyGeometryError on an empty index.
  Hit nearest(const Vec3& q) const;

  /// Nearest point within `max_distance` (inclusive), or nullopt.
  std::optional<Hit> nearest_within(const Vec3& q, double max_distance) const;

  /// The min(k, size) nearest points in nondecreasing distance order.
  std::vector<Hit> knn(const Vec3& q, int k) const;

 private:
  struct Node {
    double split = 0.0;
    int axis = -1;      // -1 marks a leaf
    int left = -1;      // child node ids, or [begin,end) into order_ for leaves
    int right = -1;
  };

  int build(int begin, int end);

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace meshrag
