#include "meshrag/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "meshrag/errors.hpp"
#include "meshrag/geometry.hpp"
#include "meshrag/kdtree.hpp"
#include "meshrag/obb.hpp"
#include "meshrag/sampling.hpp"

namespace meshrag {

namespace {

double mask_iou(const std::vector<char>& a, const std::vector<char>& b) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool ia = a[i] != 0;
    const bool ib = b[i] != 0;
    inter += ia && ib;
    uni += ia || ib;
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<char> union_mask(const std::vector<int>& cluster,
                             const std::vector<MaskCandidate>& candidates) {
  std::vector<char> u(candidates.empty() ? 0 : candidates[0].mask.size(), 0);
  for (int ci : cluster) {
    const auto& m = candidates[ci].mask;
    for (std::size_t i = 0; i < m.size(); ++i) u[i] |= m[i];
  }
  return u;
}

void validate_candidates(const std::vector<MaskCandidate>& candidates) {
  for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
    if (candidates[i].score < candidates[i + 1].score) {
      throw BadCountError("candidates must be sorted by descending score");
    }
  }
}

}  // namespace

Clusters nms_cluster(const std::vector<MaskCandidate>& candidates, double tau_nms) {
  if (tau_nms <= 0.0 || tau_nms >= 1.0) {
    throw BadCountError("tau_nms must lie in (0, 1)");
  }
  validate_candidates(candidates);

  Clusters clusters;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bool placed = false;
    for (auto& cluster : clusters) {
      // The representative is the first (highest-score) member.
      const auto& rep = candidates[cluster.front()];
      if (mask_iou(candidates[c].mask, rep.mask) > tau_nms) {
        cluster.push_back(static_cast<int>(c));
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({static_cast<int>(c)});
  }
  return clusters;
}

Clusters filter_small_clusters(Clusters clusters) {
  Clusters kept;
  for (auto& c : clusters) {
    if (c.size() > 2) kept.push_back(std::move(c));
  }
  return kept;
}

Clusters merge_by_obb_iou(Clusters clusters,
                          const std::vector<MaskCandidate>& candidates,
                          const PointCloud& cloud, double tau_merge) {
  auto cluster_obb = [&](const std::vector<int>& cluster) {
    const std::vector<char> u = union_mask(cluster, candidates);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i]) pts.push_back(cloud.positions[i]);
    }
    return compute_obb(pts);
  };

  bool merged = true;
  while (merged) {
    merged = false;
    std::vector<Obb> obbs;
    obbs.reserve(clusters.size());
    for (const auto& c : clusters) obbs.push_back(cluster_obb(c));

    for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        if (obb_iou(obbs[i], obbs[j]) > tau_merge) {
          auto& dst = clusters[i];
          dst.insert(dst.end(), clusters[j].begin(), clusters[j].end());
          clusters.erase(clusters.begin() + static_cast<long>(j));
          merged = true;
        }
      }
    }
  }
  return clusters;
}

Clusters recover_unassigned(Clusters clusters,
                            const std::vector<MaskCandidate>& candidates,
                            double tau_recover) {
  if (candidates.empty()) return clusters;
  const std::size_t n = candidates[0].mask.size();

  std::vector<char> unassigned(n, 1);
  std::vector<char> in_cluster(candidates.size(), 0);
  for (const auto& cluster : clusters) {
    for (int ci : cluster) {
      in_cluster[ci] = 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (candidates[ci].mask[i]) unassigned[i] = 0;
      }
    }
  }

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (in_cluster[c]) continue;
    const auto& mask = candidates[c].mask;
    std::size_t total = 0;
    std::size_t free_pts = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      ++total;
      free_pts += unassigned[i] != 0;
    }
    if (total == 0) continue;
    const double fraction = static_cast<double>(free_pts) / static_cast<double>(total);
    if (fraction > tau_recover) {
      clusters.push_back({static_cast<int>(c)});
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) unassigned[i] = 0;
      }
    }
  }
  return clusters;
}

SegmentLabels assign_labels(const Clusters& clusters,
                            const std::vector<MaskCandidate>& candidates,
                            std::size_t n_points) {
  std::vector<std::vector<char>> unions;
  unions.reserve(clusters.size());
  for (const auto& c : clusters) unions.push_back(union_mask(c, candidates));

  std::vector<int> order(clusters.size());
  std::iota(order.begin(), order.end(), 0);
  auto area = [&](int i) {
    return std::count(unions[i].begin(), unions[i].end(), char(1));
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return area(a) > area(b); });

  std::vector<int> raw(n_points, 0);
  int next = 0;
  for (int ci : order) {
    ++next;
    for (std::size_t i = 0; i < n_points; ++i) {
      if (unions[ci][i]) raw[i] = next;
    }
  }

  // Compact: overwriting may have emptied earlier (larger) clusters.
  std::vector<int> remap(next + 1, 0);
  for (int v : raw) {
    if (v > 0) remap[v] = 1;
  }
  int n_parts = 0;
  for (int v = 1; v <= next; ++v) {
    if (remap[v]) remap[v] = ++n_parts;
  }

  SegmentLabels out;
  out.labels.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) out.labels[i] = remap[raw[i]];
  out.n_parts = n_parts;
  return out;
}

SegmentationResult segment_auto(const PointCloud& cloud, SegmenterBackend& backend,
                                const SegmentationParams& params) {
  if (cloud.empty()) throw EmptyGeometryError("segment_auto on an empty cloud");
  if (params.n_prompts < 1) throw BadCountError("segment_auto requires n_prompts >= 1");

  const auto [normalized, to_original] = normalize_geometry(cloud);
  (void)to_original;

  const int n_prompts = std::min<int>(params.n_prompts, static_cast<int>(cloud.size()));
  const std::vector<int> prompts =
      farthest_point_sample(normalized, n_prompts, params.seed);

  backend.prepare(normalized);
  std::vector<MaskCandidate> candidates;
  candidates.reserve(prompts.size());
  for (int p : prompts) {
    std::array<MaskCandidate, 3> three;
    try {
      three = backend.segment_prompt(normalized, p);
    } catch (const BackendError& e) {
      throw BackendError("segmenter backend failed at prompt index " +
                             std::to_string(p) + ": " + e.what(),
                         p);
    }
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (three[i].score > three[best].score) best = i;
    }
    if (three[best].mask.size() != cloud.size()) {
      throw BackendError("segmenter backend returned a mask of wrong length", p);
    }
    candidates.push_back(std::move(three[best]));
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const MaskCandidate& a, const MaskCandidate& b) {
                     return a.score > b.score;
                   });

  Clusters clusters = nms_cluster(candidates, params.tau_nms);
  clusters = filter_small_clusters(std::move(clusters));
  clusters = merge_by_obb_iou(std::move(clusters), candidates, normalized,
                              params.tau_merge);

  // Coverage before recovery, for the monotonicity property.
  SegmentationResult result;
  {
    std::vector<char> covered(cloud.size(), 0);
    for (const auto& cluster : clusters) {
      for (int ci : cluster) {
        for (std::size_t i = 0; i < cloud.size(); ++i) {
          if (candidates[ci].mask[i]) covered[i] = 1;
        }
      }
    }
    const auto n_free = std::count(covered.begin(), covered.end(), char(0));
    result.unassigned_before_recovery =
        static_cast<double>(n_free) / static_cast<double>(cloud.size());
  }

  clusters = recover_unassigned(std::move(clusters), candidates, params.tau_recover);
  if (clusters.empty()) {
    throw EmptySegmentationError("no cluster survived segmentation");
  }

  result.raw_labels = assign_labels(clusters, candidates, cloud.size());
  if (result.raw_labels.n_parts == 0) {
    throw EmptySegmentationError("all surviving clusters have empty masks");
  }
  {
    const auto n_free = std::count(result.raw_labels.labels.begin(),
                                   result.raw_labels.labels.end(), 0);
    result.unassigned_after_recovery =
        static_cast<double>(n_free) / static_cast<double>(cloud.size());
  }

  // Attach residual unlabeled points to their nearest labeled neighbor.
  result.labels = result.raw_labels;
  if (result.unassigned_after_recovery > 0.0) {
    std::vector<Vec3> labeled_pts;
    std::vector<int> labeled_ids;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (result.labels.labels[i] > 0) {
        labeled_pts.push_back(cloud.positions[i]);
        labeled_ids.push_back(result.labels.labels[i]);
      }
    }
    const NeighborIndex index(std::move(labeled_pts));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (result.labels.labels[i] == 0) {
        result.labels.labels[i] = labeled_ids[index.nearest(cloud.positions[i]).index];
      }
    }
  }
  result.labels.validate();

  result.part_indices.resize(result.labels.n_parts);
  result.parts.resize(result.labels.n_parts);
  const bool with_normals = cloud.has_normals();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const int part = result.labels.labels[i] - 1;
    result.part_indices[part].push_back(static_cast<int>(i));
    result.parts[part].positions.push_back(cloud.positions[i]);
    if (with_normals) result.parts[part].normals.push_back(cloud.normals[i]);
  }
  return result;
}

std::string labels_to_json(const SegmentLabels& labels) {
  nlohmann::json j;
  j["n_parts"] = labels.n_parts;
  j["labels"] = labels.labels;
  return j.dump();
}

SegmentLabels labels_from_json(const std::string& text) {
  SegmentLabels out;
  try {
    const auto j = nlohmann::json::parse(text);
    out.n_parts = j.at("n_parts").get<int>();
    out.labels = j.at("labels").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad labels JSON: ") + e.what());
  }
  return out;
}

}  // namespace meshrag
