// End-to-end acceptance gates. Each criterion prints one [PASS]/[FAIL] line
// with its measured values and pinned thresholds; the process exits nonzero
// when any executed criterion fails. Run with --criterion N for a single one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "meshrag/builtin_segmenter.hpp"
#include "meshrag/editing.hpp"
#include "meshrag/geometry.hpp"
#include "meshrag/meshdist.hpp"
#include "meshrag/metrics.hpp"
#include "meshrag/mock_backend.hpp"
#include "meshrag/pipeline.hpp"
#include "meshrag/registration.hpp"
#include "meshrag/rng.hpp"
#include "meshrag/sampling.hpp"
#include "meshrag/segmentation.hpp"
#include "meshrag/types.hpp"

#include "test_support.hpp"

namespace {

using namespace meshrag;
using namespace meshrag::testing;

constexpr double kCdTol = 2e-3;
constexpr double kMetricTol = 1e-12;
constexpr double kIouTol = 0.95;
constexpr double kIdempotenceTol = 1e-5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec3 random_unit_axis(Rng& rng) {
  Vec3 axis;
  do {
    axis = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  } while (axis.norm() < 1e-3);
  return axis.normalized();
}

// Ground-truth pose: translate after rotating the per-axis scaled part.
AffineTransform random_pose(Rng& rng, double min_rotation_deg, double max_rotation_deg) {
  const Vec3 t(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  const Vec3 s(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
  const Vec3 axis = random_unit_axis(rng);
  const double angle = rng.uniform(min_rotation_deg, max_rotation_deg);
  return AffineTransform::translation(t) * rotation_about(axis, angle) *
         AffineTransform::scaling(s);
}

bool meshes_bitwise_equal(const TriMesh& a, const TriMesh& b) {
  if (a.vertices.size() != b.vertices.size() || a.faces != b.faces) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    if (!(a.vertices[i].array() == b.vertices[i].array()).all()) return false;
  }
  return true;
}

void append_cloud(PointCloud& dst, const PointCloud& src) {
  dst.positions.insert(dst.positions.end(), src.positions.begin(), src.positions.end());
  dst.normals.insert(dst.normals.end(), src.normals.begin(), src.normals.end());
}

// C1: 100 seeded parts, each normalized and hidden behind a pose with
// translation in [-1,1]^3, per-axis scale in [0.5,2], rotation up to 10
// degrees. retrieve_transform must land at least 98 within kCdTol of the
// posed surface, in under 60 s.
bool criterion1() {
  const auto t0 = Clock::now();
  int placed = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(0x9001u + static_cast<std::uint64_t>(i));
    const TriMesh part = normalize_geometry(make_blob(1000 + i)).first;
    const AffineTransform gt = random_pose(rng, 0.0, 10.0);
    const TriMesh gt_world = apply_transform(gt, part);
    const PointCloud target =
        sample_surface(gt_world, 8192, 0x4000u + static_cast<std::uint64_t>(i));
    const RetrievalResult ret =
        retrieve_transform(part, target, IcpParams{}, 0x500u + static_cast<std::uint64_t>(i));
    const double cd = mesh_chamfer_l2(apply_transform(ret.t_final, part), gt_world);
    worst = std::max(worst, cd);
    if (cd <= kCdTol) ++placed;
  }
  const double wall = seconds_since(t0);
  const bool pass = placed >= 98 && wall <= 60.0;
  std::printf("[%s] C1 transform retrieval: %d/100 placements within %.0e (worst %.2e), %.1fs (limit 60s)\n",
              pass ? "PASS" : "FAIL", placed, kCdTol, worst, wall);
  return pass;
}

// C2: staged quality must be monotone on every object (coarse beats the raw
// unplaced part, ICP never loses to coarse), and the ICP stage stays under
// one second per object. Rotation is drawn from [2,10] degrees so the
// refinement stage has something real to correct.
bool criterion2() {
  const int n_objects = 10;
  int monotone = 0;
  double sum_raw = 0.0, sum_coarse = 0.0, sum_icp = 0.0, max_icp_wall = 0.0;
  for (int i = 0; i < n_objects; ++i) {
    Rng rng(0x9101u + static_cast<std::uint64_t>(i));
    const TriMesh part = normalize_geometry(make_blob(1100 + i)).first;
    const AffineTransform gt = random_pose(rng, 2.0, 10.0);
    const TriMesh gt_world = apply_transform(gt, part);
    const PointCloud target =
        sample_surface(gt_world, 8192, 0x4100u + static_cast<std::uint64_t>(i));
    const RetrievalResult ret =
        retrieve_transform(part, target, IcpParams{}, 0x600u + static_cast<std::uint64_t>(i));
    const double cd_raw = mesh_chamfer_l2(part, gt_world);
    const double cd_coarse = mesh_chamfer_l2(apply_transform(ret.t_restore, part), gt_world);
    const double cd_icp = mesh_chamfer_l2(apply_transform(ret.t_final, part), gt_world);
    sum_raw += cd_raw;
    sum_coarse += cd_coarse;
    sum_icp += cd_icp;
    max_icp_wall = std::max(max_icp_wall, ret.icp_seconds);
    if (cd_coarse < cd_raw && cd_icp <= cd_coarse) ++monotone;
  }
  const bool pass = monotone == n_objects && max_icp_wall <= 1.0;
  std::printf("[%s] C2 stage ablation: monotone on %d/%d objects, mean cd raw %.2e > coarse %.2e >= icp %.2e, max icp wall %.3fs (limit 1s)\n",
              pass ? "PASS" : "FAIL", monotone, n_objects, sum_raw / n_objects,
              sum_coarse / n_objects, sum_icp / n_objects, max_icp_wall);
  return pass;
}

// C3: accelerated cloud metrics against the quadratic oracles on 200 seeded
// pairs of up to 200 points, within kMetricTol, in under 30 s.
bool criterion3() {
  const auto t0 = Clock::now();
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    Rng rng(0x9201u + static_cast<std::uint64_t>(i));
    const int na = 1 + static_cast<int>(rng.below(200));
    const int nb = 1 + static_cast<int>(rng.below(200));
    const PointCloud a = random_cloud(na, 0x7000u + 2 * static_cast<std::uint64_t>(i));
    const PointCloud b = random_cloud(nb, 0x7001u + 2 * static_cast<std::uint64_t>(i));
    const auto [l1, l2] = chamfer(a, b);
    const BruteChamfer bc = brute_chamfer(a, b);
    max_err = std::max(max_err, std::abs(l1 - bc.l1));
    max_err = std::max(max_err, std::abs(l2 - bc.l2));
    max_err = std::max(max_err, std::abs(hausdorff(a, b) - brute_hausdorff(a, b)));
    max_err = std::max(max_err,
                       std::abs(normal_consistency(a, b) - brute_normal_consistency(a, b)));
    for (const double tau : {0.02, 0.5}) {
      max_err = std::max(max_err, std::abs(fscore(a, b, tau) - brute_fscore(a, b, tau)));
    }
  }
  const double wall = seconds_since(t0);
  const bool pass = max_err <= kMetricTol && wall <= 30.0;
  std::printf("[%s] C3 metric parity: max deviation %.2e over 200 pairs (tol %.0e), %.1fs (limit 30s)\n",
              pass ? "PASS" : "FAIL", max_err, kMetricTol, wall);
  return pass;
}

// C4: automatic segmentation on 20 seeded scenes of 2..6 disjoint primitives.
// At least 18 must recover the exact part count with min per-part IoU of
// kIouTol; the partition and recovery-coverage invariants must hold on all.
bool criterion4() {
  int correct = 0, invariants = 0;
  double worst_iou = 1.0;
  for (int i = 0; i < 20; ++i) {
    const int n_parts = 2 + (i % 5);
    const Scene scene = make_primitive_scene(2000 + static_cast<std::uint64_t>(i),
                                             n_parts, 700);
    BuiltinGeometricSegmenter segmenter;
    const SegmentationResult res = segment_auto(scene.cloud, segmenter);
    bool inv = res.labels.labels.size() == scene.cloud.size() &&
               res.unassigned_after_recovery <= res.unassigned_before_recovery;
    try {
      res.labels.validate();
    } catch (const Error&) {
      inv = false;
    }
    for (const int label : res.labels.labels) {
      inv = inv && label >= 1 && label <= res.labels.n_parts;
    }
    if (inv) ++invariants;
    if (res.labels.n_parts == n_parts) {
      const double iou = min_label_iou(res.labels.labels, scene.gt_labels, n_parts);
      if (iou >= kIouTol) {
        ++correct;
        worst_iou = std::min(worst_iou, iou);
      }
    }
  }
  const bool pass = correct >= 18 && invariants == 20;
  std::printf("[%s] C4 segmentation: %d/20 scenes at exact count with min IoU >= %.2f (worst %.3f, need 18), invariants on %d/20\n",
              pass ? "PASS" : "FAIL", correct, kIouTol, worst_iou, invariants);
  return pass;
}

// C5: six-part object through the jittering oracle backend. The assembly must
// land within kCdTol of the ground-truth surface and be bitwise identical
// across batch sizes 1, 4, and 8.
bool criterion5() {
  const Scene scene = make_blob_scene(5001, 6, 1200);
  const SegmentLabels labels{scene.gt_labels, 6};
  const TriMesh gt = scene.combined_mesh();
  TriMesh reference;
  double cd = std::numeric_limits<double>::infinity();
  bool identical = true;
  for (const int batch : {1, 4, 8}) {
    MockOracleBackend::Options mo;
    mo.jitter = true;
    MockOracleBackend backend(mo);
    for (std::size_t p = 0; p < scene.parts.size(); ++p) {
      backend.add_part(static_cast<int>(p) + 1, scene.parts[p].mesh);
    }
    PipelineOptions po;
    po.batch_size = batch;
    auto [mesh, report] = generate_parallel(scene.cloud, labels, backend, po);
    (void)report;
    if (batch == 1) {
      reference = std::move(mesh);
      cd = mesh_chamfer_l2(reference, gt);
    } else {
      identical = identical && meshes_bitwise_equal(mesh, reference);
    }
  }
  const bool pass = cd <= kCdTol && identical;
  std::printf("[%s] C5 parallel generation: assembled cd %.2e (tol %.0e), batch {1,4,8} outputs %s\n",
              pass ? "PASS" : "FAIL", cd, kCdTol,
              identical ? "bitwise identical" : "DIFFER");
  return pass;
}

// C6: for each of 10 objects, drop two of the four parts from the mesh, feed
// full-object samples back as the edited cloud, and rebuild through the
// oracle backend. At least 9 rebuilds must land within kCdTol of the full
// ground truth, and re-running the same edit must be a no-op every time.
// The kept parts are corner boxes that pin the object's bounding box, so the
// initial alignment is exact by construction.
bool criterion6() {
  int rebuilt = 0, noop = 0;
  double worst_cd = 0.0;
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t base = 6000 + 2 * static_cast<std::uint64_t>(i);
    const TriMesh box_a = make_box(Vec3(0.0, 0.0, 0.0), Vec3(0.3, 0.3, 0.3));
    const TriMesh box_b = make_box(Vec3(3.0, 0.2, 0.1), Vec3(0.3, 0.3, 0.3));
    const TriMesh blob_a = make_blob(base, Vec3(1.0, 0.05, 0.0), 0.22);
    const TriMesh blob_b = make_blob(base + 1, Vec3(2.0, 0.10, 0.05), 0.22);
    TriMesh initial = box_a;
    append_mesh(initial, box_b);
    TriMesh full = initial;
    append_mesh(full, blob_a);
    append_mesh(full, blob_b);
    PointCloud cloud = sample_surface(box_a, 2000, 0xA000u + 4 * static_cast<std::uint64_t>(i));
    append_cloud(cloud, sample_surface(box_b, 2000, 0xA001u + 4 * static_cast<std::uint64_t>(i)));
    append_cloud(cloud, sample_surface(blob_a, 1500, 0xA002u + 4 * static_cast<std::uint64_t>(i)));
    append_cloud(cloud, sample_surface(blob_b, 1500, 0xA003u + 4 * static_cast<std::uint64_t>(i)));

    MockOracleBackend::Options mo;
    mo.match = MockOracleBackend::Match::ByGeometry;
    MockOracleBackend backend(mo);
    backend.add_part(1, blob_a);
    backend.add_part(2, blob_b);
    BuiltinGeometricSegmenter segmenter;

    EditRequest request;
    request.initial_mesh = initial;
    request.edited_cloud = cloud;
    auto [mesh1, report1] = edit_incremental(request, backend, segmenter);
    (void)report1;
    const double cd = mesh_chamfer_l2(mesh1, full);
    worst_cd = std::max(worst_cd, cd);
    if (cd <= kCdTol) ++rebuilt;

    EditRequest again = request;
    again.initial_mesh = mesh1;
    auto [mesh2, report2] = edit_incremental(again, backend, segmenter);
    bool unchanged = report2.no_change && mesh2.faces == mesh1.faces &&
                     mesh2.vertices.size() == mesh1.vertices.size();
    if (unchanged) {
      double dev = 0.0;
      for (std::size_t v = 0; v < mesh1.vertices.size(); ++v) {
        dev = std::max(dev, (mesh2.vertices[v] - mesh1.vertices[v]).cwiseAbs().maxCoeff());
      }
      unchanged = dev <= kIdempotenceTol;
    }
    if (unchanged) ++noop;
  }
  const bool pass = rebuilt >= 9 && noop == 10;
  std::printf("[%s] C6 incremental editing: %d/10 rebuilds within %.0e (worst %.2e, need 9), no-op re-run on %d/10\n",
              pass ? "PASS" : "FAIL", rebuilt, kCdTol, worst_cd, noop);
  return pass;
}

// C7: 16-part object against a fixed-latency backend. Pipeline time must be
// nonincreasing over batch sizes 1, 2, 4, 8, with batch 8 at least 3x faster
// than batch 1.
bool criterion7() {
  std::vector<TriMesh> parts;
  PointCloud cloud;
  std::vector<int> labels_raw;
  for (int p = 0; p < 16; ++p) {
    const Vec3 center(1.5 * (p % 4), 1.5 * (p / 4), 0.0);
    parts.push_back(make_blob(7100 + static_cast<std::uint64_t>(p), center, 0.3));
    append_cloud(cloud, sample_surface(parts.back(), 300, 7200 + static_cast<std::uint64_t>(p)));
    labels_raw.insert(labels_raw.end(), 300, p + 1);
  }
  const SegmentLabels labels{labels_raw, 16};

  const int batches[4] = {1, 2, 4, 8};
  double totals[4] = {};
  for (int k = 0; k < 4; ++k) {
    MockOracleBackend::Options mo;
    mo.latency_seconds = 0.1;
    MockOracleBackend backend(mo);
    for (int p = 0; p < 16; ++p) backend.add_part(p + 1, parts[static_cast<std::size_t>(p)]);
    PipelineOptions po;
    po.batch_size = batches[k];
    po.icp.sample_count = 1024;
    auto [mesh, report] = generate_parallel(cloud, labels, backend, po);
    (void)mesh;
    totals[k] = report.total_seconds;
  }
  bool nonincreasing = true;
  for (int k = 1; k < 4; ++k) nonincreasing = nonincreasing && totals[k] <= totals[k - 1];
  const double speedup = totals[0] / totals[3];
  const bool pass = nonincreasing && speedup >= 3.0;
  std::printf("[%s] C7 batch timing: totals %.2f %.2f %.2f %.2f s %s, batch-8 speedup %.1fx (need 3x)\n",
              pass ? "PASS" : "FAIL", totals[0], totals[1], totals[2], totals[3],
              nonincreasing ? "nonincreasing" : "NOT MONOTONE", speedup);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      criterion = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (criterion < 0 || criterion > 7) {
    std::fprintf(stderr, "criterion must be in 1..7 (0 or absent runs all)\n");
    return 2;
  }
  bool (*const checks[7])() = {criterion1, criterion2, criterion3, criterion4,
                               criterion5, criterion6, criterion7};
  bool all_pass = true;
  for (int c = 1; c <= 7; ++c) {
    if (criterion == 0 || criterion == c) {
      all_pass = checks[c - 1]() && all_pass;
    }
  }
  return all_pass ? 0 : 1;
}
