#include "meshrag/builtin_segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "meshrag/errors.hpp"
#include "meshrag/kdtree.hpp"

namespace meshrag {

void BuiltinGeometricSegmenter::prepare(const PointCloud& cloud) {
  if (!cloud.has_normals()) {
    throw NoNormalsError("the geometric segmenter requires normals");
  }
  const NeighborIndex index(cloud);
  const int n = static_cast<int>(cloud.size());
  neighbors_.assign(n, {});
  spacing_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto hits = index.knn(cloud.positions[i], kMaxNeighbors + 1);
    double acc = 0.0;
    int acc_n = 0;
    for (const auto& hit : hits) {
      if (hit.index == i) continue;
      neighbors_[i].push_back(hit.index);
      if (acc_n < 8) {
        acc += hit.distance;
        ++acc_n;
      }
    }
    spacing_[i] = acc_n > 0 ? acc / acc_n : 0.0;
  }
  prepared_size_ = cloud.size();
}

MaskCandidate BuiltinGeometricSegmenter::grow(const PointCloud& cloud,
                                              int prompt_index, int k) const {
  const double cos_gate = std::cos(kMaxAngleDeg * std::numbers::pi / 180.0);

  MaskCandidate out;
  out.mask.assign(cloud.size(), 0);
  out.prompt_index = prompt_index;
  out.mask[prompt_index] = 1;

  double cos_sum = 0.0;
  long edge_count = 0;
  std::deque<int> frontier{prompt_index};
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop_front();
    const int fan = std::min<int>(k, static_cast<int>(neighbors_[i].size()));
    for (int t = 0; t < fan; ++t) {
      const int j = neighbors_[i][t];
      const double cos_ij = cloud.normals[i].dot(cloud.normals[j]);
      const double len = (cloud.positions[i] - cloud.positions[j]).norm();
      const double max_len = kEdgeLengthFactor * 0.5 * (spacing_[i] + spacing_[j]);
      if (cos_ij <= cos_gate || len >= max_len) continue;
      cos_sum += cos_ij;
      ++edge_count;
      if (!out.mask[j]) {
        out.mask[j] = 1;
        frontier.push_back(j);
      }
    }
  }
  out.score = edge_count > 0 ? std::clamp(cos_sum / edge_count, 0.0, 1.0) : 0.0;
  return out;
}

std::array<MaskCandidate, 3> BuiltinGeometricSegmenter::segment_prompt(
    const PointCloud& cloud, int prompt_index) {
  if (!cloud.has_normals()) {
    throw NoNormalsError("the geometric segmenter requires normals");
  }
  if (prepared_size_ != cloud.size()) prepare(cloud);
  if (prompt_index < 0 || prompt_index >= static_cast<int>(cloud.size())) {
    throw BadCountError("prompt index out of range");
  }
  return {grow(cloud, prompt_index, 8), grow(cloud, prompt_index, 16),
          grow(cloud, prompt_index, 32)};
}

}  // namespace meshrag
