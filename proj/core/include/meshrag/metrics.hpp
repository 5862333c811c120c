#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "meshrag/types.hpp"

namespace meshrag {

struct MetricParams {
  int sample_count = 8192;
  double tau_f1 = 0.02;
  int edge_k = 10;
  double edge_angle_deg = 30.0;
  std::uint64_t seed = 0;
  bool normalize = true;
};

struct MetricsReport {
  double cd_l1 = 0.0;
  double cd_l2 = 0.0;
  double hd = 0.0;
  double nc = 0.0;
  double f1 = 0.0;
  double ecd = 0.0;
  double ef1 = 0.0;
  bool edges_empty_fallback = false;
  MetricParams params;
};

// Bidirectional Chamfer distances: per direction the mean (L1) and RMS (L2)
// of nearest-neighbor distances, each averaged over the two directions.
std::pair<double, double> chamfer(const PointCloud& a, const PointCloud& b);

// Bidirectional Hausdorff distance.
double hausdorff(const PointCloud& a, const PointCloud& b);

// Mean absolute dot product between each point's normal and its nearest
// neighbor's normal in the other cloud, averaged over both directions.
double normal_consistency(const PointCloud& a, const PointCloud& b);

// F-score at distance threshold tau: harmonic mean of precision (fraction of
// a within tau of b) and recall (fraction of b within tau of a).
double fscore(const PointCloud& a, const PointCloud& b, double tau);

// Keeps the points whose normal deviates from at least one of its k nearest
// neighbors' normals by more than angle_threshold_deg.
PointCloud extract_edges(const PointCloud& cloud, int k, double angle_threshold_deg);

// Full seven-metric report between two meshes: both are normalized (unless
// disabled), sampled with the same seed, and compared. Edge metrics fall back
// to ECD = sqrt(3), EF1 = 0 when either extracted edge set is empty.
MetricsReport evaluate_all(const TriMesh& pred, const TriMesh& gt,
                           const MetricParams& params = {});

std::string to_json_string(const MetricsReport& report);
std::string metrics_csv_header();
std::string to_csv_row(const std::string& name, const MetricsReport& report,
                       double wall_seconds);

}  // namespace meshrag
