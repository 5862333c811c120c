#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "meshrag/types.hpp"

namespace meshrag {

// One candidate mask for a prompt point, with its predicted-quality score.
struct MaskCandidate {
  std::vector<char> mask;  // one flag per cloud point
  double score = 0.0;      // in [0, 1]
  int prompt_index = -1;
};

// Seam for the neural prompt segmenter: given a cloud and a prompt point,
// produce three candidate masks with scores. prepare() is called once per
// cloud before any prompts and may precompute acceleration structures.
class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  virtual void prepare(const PointCloud& cloud) { (void)cloud; }
  virtual std::array<MaskCandidate, 3> segment_prompt(const PointCloud& cloud,
                                                      int prompt_index) = 0;
  virtual bool deterministic() const { return true; }
};

struct SegmentationParams {
  int n_prompts = 64;
  double tau_nms = 0.5;
  double tau_merge = 0.5;
  double tau_recover = 0.7;
  std::uint64_t seed = 0;
};

// Clusters are lists of candidate indices; the representative of a cluster is
// its first (highest-score) member. Candidates must be sorted by descending
// score before clustering.
using Clusters = std::vector<std::vector<int>>;

Clusters nms_cluster(const std::vector<MaskCandidate>& candidates, double tau_nms);

// Drops clusters with 2 or fewer member masks.
Clusters filter_small_clusters(Clusters clusters);

// Merges cluster pairs whose union-mask OBBs overlap with IoU above
// tau_merge, repeated to a fixpoint.
Clusters merge_by_obb_iou(Clusters clusters,
                          const std::vector<MaskCandidate>& candidates,
                          const PointCloud& cloud, double tau_merge);

// Reinstates discarded masks that mostly cover still-unassigned points,
// re-evaluating the unassigned set after each reinstatement in candidate
// (score-descending) order.
Clusters recover_unassigned(Clusters clusters,
                            const std::vector<MaskCandidate>& candidates,
                            double tau_recover);

// Writes cluster union masks over the label field in descending area order,
// so smaller clusters win contested points, then compacts labels to
// 1..n_parts. 0 marks unassigned points.
SegmentLabels assign_labels(const Clusters& clusters,
                            const std::vector<MaskCandidate>& candidates,
                            std::size_t n_points);

struct SegmentationResult {
  SegmentLabels labels;      // final labels; residual points attached
  SegmentLabels raw_labels;  // before residual attachment; may contain 0s
  std::vector<std::vector<int>> part_indices;  // per part, original indices
  std::vector<PointCloud> parts;               // split clouds, original frame
  double unassigned_before_recovery = 0.0;     // fraction of points
  double unassigned_after_recovery = 0.0;
};

// Full automatic segmentation: normalize, FPS prompts, best-of-three masks
// per prompt, score-descending NMS, small-cluster filter, OBB merge,
// recovery, area-descending label assignment. Residual unlabeled points are
// attached to their nearest labeled neighbor before the cloud is split.
SegmentationResult segment_auto(const PointCloud& cloud, SegmenterBackend& backend,
                                const SegmentationParams& params = {});

std::string labels_to_json(const SegmentLabels& labels);
SegmentLabels labels_from_json(const std::string& text);

}  // namespace meshrag
