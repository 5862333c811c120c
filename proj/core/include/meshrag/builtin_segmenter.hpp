#pragma once

#include <vector>

#include "meshrag/segmentation.hpp"

namespace meshrag {

// Deterministic geometric stand-in for the neural prompt segmenter: region
// growing from the prompt point over a k-NN graph at three scales, gated by
// normal agreement and adaptive edge length. Requires normals.
class BuiltinGeometricSegmenter : public SegmenterBackend {
 public:
  void prepare(const PointCloud& cloud) override;
  std::array<MaskCandidate, 3> segment_prompt(const PointCloud& cloud,
                                              int prompt_index) override;
  bool deterministic() const override { return true; }

 private:
  MaskCandidate grow(const PointCloud& cloud, int prompt_index, int k) const;

  static constexpr int kMaxNeighbors = 32;
  static constexpr double kMaxAngleDeg = 35.0;
  static constexpr double kEdgeLengthFactor = 2.5;

  std::vector<std::vector<int>> neighbors_;  // kMaxNeighbors per point
  std::vector<double> spacing_;              // mean distance to 8 nearest
  std::size_t prepared_size_ = 0;
};

}  // namespace meshrag
