#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "meshrag/types.hpp"

namespace meshrag {

// Area-weighted surface sampling. Each sample carries the normal of the face
// it was drawn from. Deterministic for a fixed seed.
PointCloud sample_surface(const TriMesh& mesh, int n, std::uint64_t seed);

// Greedy max-min farthest point sampling. The start index is drawn from the
// seed; distance ties resolve to the lowest candidate index.
std::vector<int> farthest_point_sample(std::span<const Vec3> points, int k,
                                       std::uint64_t seed);
std::vector<int> farthest_point_sample(const PointCloud& cloud, int k,
                                       std::uint64_t seed);

// Same selection with the start pinned, for callers that already chose it.
std::vector<int> farthest_point_sample_from(std::span<const Vec3> points, int k,
                                            int start_index);

}  // namespace meshrag
