#include "meshrag/mock_backend.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "meshrag/errors.hpp"
#include "meshrag/geometry.hpp"
#include "meshrag/rng.hpp"

namespace meshrag {

namespace {

constexpr std::size_t kProbePoints = 256;

}  // namespace

MockOracleBackend::MockOracleBackend(Options options) : options_(std::move(options)) {}

void MockOracleBackend::add_part(int part_id, const TriMesh& mesh) {
  TriMesh normalized = normalize_geometry(mesh).first;
  surfaces_.insert_or_assign(part_id, TriangleBvh(normalized));
  parts_[part_id] = std::move(normalized);
}

const TriMesh& MockOracleBackend::lookup(const GenerationJob& job) const {
  if (parts_.empty()) throw UnknownPartError("mock backend has no parts configured");

  if (options_.match == Match::ById) {
    const auto it = parts_.find(job.part_id);
    if (it == parts_.end()) {
      throw UnknownPartError("mock backend knows no part " +
                             std::to_string(job.part_id));
    }
    return it->second;
  }

  // Geometry match: the prompt cloud is normalized like the stored parts, so
  // its mean distance to the matching part's surface is near zero while any
  // other part sits a bump pattern away.
  std::vector<Vec3> probe;
  const std::size_t stride =
      std::max<std::size_t>(1, job.prompt_cloud.size() / kProbePoints);
  for (std::size_t i = 0; i < job.prompt_cloud.size(); i += stride) {
    probe.push_back(job.prompt_cloud.positions[i]);
  }

  double best = std::numeric_limits<double>::infinity();
  const TriMesh* best_mesh = nullptr;
  for (const auto& [id, bvh] : surfaces_) {
    double acc = 0.0;
    for (const Vec3& p : probe) acc += bvh.distance(p);
    const double d = acc / static_cast<double>(probe.size());
    if (d < best) {
      best = d;
      best_mesh = &parts_.at(id);
    }
  }
  return *best_mesh;
}

GenerationResult MockOracleBackend::generate(const GenerationJob& job) {
  const auto t0 = std::chrono::steady_clock::now();
  if (options_.latency_seconds > 0.0) {
    std::this_thread::sleep_for(
        std::chrono::duration<double>(options_.latency_seconds));
  }
  if (std::find(options_.fail_parts.begin(), options_.fail_parts.end(),
                job.part_id) != options_.fail_parts.end()) {
    throw BackendError("injected failure for part " + std::to_string(job.part_id),
                       job.part_id);
  }

  GenerationResult out;
  out.part_id = job.part_id;
  out.mesh = lookup(job);

  if (options_.jitter) {
    Rng rng(job.seed);
    const double angle = rng.uniform(0.0, options_.max_rotation_deg) *
                         std::numbers::pi / 180.0;
    // Uniformish random axis; exact distribution is irrelevant here.
    Vec3 axis(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (axis.norm() < 1e-9) axis = Vec3(0, 0, 1);
    axis.normalize();
    const Mat3 rot = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    for (Vec3& v : out.mesh.vertices) v = rot * v;
    if (options_.noise_sigma > 0.0) {
      for (Vec3& v : out.mesh.vertices) {
        // Box-Muller keeps the draw reproducible across standard libraries.
        for (int a = 0; a < 3; ++a) {
          const double u1 = std::max(rng.uniform01(), 1e-300);
          const double u2 = rng.uniform01();
          v[a] += options_.noise_sigma * std::sqrt(-2.0 * std::log(u1)) *
                  std::cos(2.0 * std::numbers::pi * u2);
        }
      }
    }
  }

  out.backend_latency =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace meshrag
