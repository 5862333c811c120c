#include "meshrag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "meshrag/errors.hpp"
#include "meshrag/geometry.hpp"
#include "meshrag/kdtree.hpp"
#include "meshrag/sampling.hpp"

namespace meshrag {

namespace {

// Nearest-neighbor distance from every point of `from` into `index`.
std::vector<double> nn_distances(const PointCloud& from, const NeighborIndex& index) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const Vec3& p : from.positions) out.push_back(index.nearest(p).distance);
  return out;
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double rms(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void require_nonempty(const PointCloud& a, const PointCloud& b, const char* op) {
  if (a.empty() || b.empty()) {
    throw EmptyGeometryError(std::string(op) + " on an empty cloud");
  }
}

}  // namespace

std::pair<double, double> chamfer(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b, "chamfer");
  const NeighborIndex ia(a);
  const NeighborIndex ib(b);
  const std::vector<double> dab = nn_distances(a, ib);
  const std::vector<double> dba = nn_distances(b, ia);
  const double cd_l1 = 0.5 * (mean(dab) + mean(dba));
  const double cd_l2 = 0.5 * (rms(dab) + rms(dba));
  return {cd_l1, cd_l2};
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b, "hausdorff");
  const NeighborIndex ia(a);
  const NeighborIndex ib(b);
  return std::max(max_of(nn_distances(a, ib)), max_of(nn_distances(b, ia)));
}

double normal_consistency(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b, "normal_consistency");
  if (!a.has_normals() || !b.has_normals()) {
    throw NoNormalsError("normal_consistency requires normals on both clouds");
  }
  const NeighborIndex ia(a);
  const NeighborIndex ib(b);

  double acc_ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int j = ib.nearest(a.positions[i]).index;
    acc_ab += std::abs(a.normals[i].dot(b.normals[j]));
  }
  double acc_ba = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const int j = ia.nearest(b.positions[i]).index;
    acc_ba += std::abs(b.normals[i].dot(a.normals[j]));
  }
  return 0.5 * (acc_ab / static_cast<double>(a.size()) +
                acc_ba / static_cast<double>(b.size()));
}

double fscore(const PointCloud& a, const PointCloud& b, double tau) {
  require_nonempty(a, b, "fscore");
  if (tau <= 0.0) throw BadCountError("fscore requires tau > 0");
  const NeighborIndex ia(a);
  const NeighborIndex ib(b);

  std::size_t hits_a = 0;
  for (const Vec3& p : a.positions) {
    if (ib.nearest(p).distance <= tau) ++hits_a;
  }
  std::size_t hits_b = 0;
  for (const Vec3& p : b.positions) {
    if (ia.nearest(p).distance <= tau) ++hits_b;
  }
  const double precision = static_cast<double>(hits_a) / static_cast<double>(a.size());
  const double recall = static_cast<double>(hits_b) / static_cast<double>(b.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

PointCloud extract_edges(const PointCloud& cloud, int k, double angle_threshold_deg) {
  if (!cloud.has_normals()) throw NoNormalsError("extract_edges requires normals");
  if (k < 2) throw BadCountError("extract_edges requires k >= 2");

  const NeighborIndex index(cloud);
  const double cos_threshold =
      std::cos(angle_threshold_deg * std::numbers::pi / 180.0);

  PointCloud edges;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto hits = index.knn(cloud.positions[i], k + 1);
    bool is_edge = false;
    int used = 0;
    for (const auto& hit : hits) {
      if (hit.index == static_cast<int>(i)) continue;
      if (used++ == k) break;
      // Angle beyond the threshold means the cosine drops below it.
      if (cloud.normals[i].dot(cloud.normals[hit.index]) < cos_threshold) {
        is_edge = true;
        break;
      }
    }
    if (is_edge) {
      edges.positions.push_back(cloud.positions[i]);
      edges.normals.push_back(cloud.normals[i]);
    }
  }
  return edges;
}

MetricsReport evaluate_all(const TriMesh& pred, const TriMesh& gt,
                           const MetricParams& params) {
  TriMesh p = pred;
  TriMesh g = gt;
  if (params.normalize) {
    p = normalize_geometry(p).first;
    g = normalize_geometry(g).first;
  }
  const PointCloud sp = sample_surface(p, params.sample_count, params.seed);
  const PointCloud sg = sample_surface(g, params.sample_count, params.seed);

  MetricsReport report;
  report.params = params;
  std::tie(report.cd_l1, report.cd_l2) = chamfer(sp, sg);
  report.hd = hausdorff(sp, sg);
  report.nc = normal_consistency(sp, sg);
  report.f1 = fscore(sp, sg, params.tau_f1);

  const PointCloud ep = extract_edges(sp, params.edge_k, params.edge_angle_deg);
  const PointCloud eg = extract_edges(sg, params.edge_k, params.edge_angle_deg);
  if (ep.empty() || eg.empty()) {
    report.edges_empty_fallback = true;
    report.ecd = std::sqrt(3.0);
    report.ef1 = 0.0;
  } else {
    report.ecd = chamfer(ep, eg).first;
    report.ef1 = fscore(ep, eg, params.tau_f1);
  }
  return report;
}

std::string to_json_string(const MetricsReport& r) {
  nlohmann::json j;
  j["cd_l1"] = r.cd_l1;
  j["cd_l2"] = r.cd_l2;
  j["hd"] = r.hd;
  j["nc"] = r.nc;
  j["f1"] = r.f1;
  j["ecd"] = r.ecd;
  j["ef1"] = r.ef1;
  j["edges_empty_fallback"] = r.edges_empty_fallback;
  j["params"] = {{"sample_count", r.params.sample_count},
                 {"tau_f1", r.params.tau_f1},
                 {"edge_k", r.params.edge_k},
                 {"edge_angle_deg", r.params.edge_angle_deg},
                 {"seed", r.params.seed},
                 {"normalize", r.params.normalize}};
  return j.dump(2);
}

std::string metrics_csv_header() {
  return "name,cd_l1,cd_l2,hd,nc,f1,ecd,ef1,t_seconds";
}

std::string to_csv_row(const std::string& name, const MetricsReport& r,
                       double wall_seconds) {
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.6g",
                name.c_str(), r.cd_l1, r.cd_l2, r.hd, r.nc, r.f1, r.ecd, r.ef1,
                wall_seconds);
  return buf;
}

}  // namespace meshrag
