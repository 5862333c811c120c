#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "meshrag/registration.hpp"
#include "meshrag/segmentation.hpp"
#include "meshrag/types.hpp"

namespace meshrag {

// One normalized segment handed to a generator backend.
struct GenerationJob {
  int part_id = 0;
  PointCloud prompt_cloud;  // normalized: longest AABB side 1
  std::uint64_t seed = 0;
};

struct GenerationResult {
  int part_id = 0;
  TriMesh mesh;
  double backend_latency = 0.0;  // seconds
};

// Seam for the neural mesh generator. generate() blocks for one job and must
// be safe to call concurrently from several threads.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual GenerationResult generate(const GenerationJob& job) = 0;
  virtual bool deterministic() const { return true; }
};

struct PipelineOptions {
  int batch_size = 8;
  IcpParams icp;
  std::uint64_t root_seed = 0;
};

struct PartRecord {
  int part_id = 0;
  std::size_t segment_points = 0;
  bool ok = false;
  std::string error;
  double backend_latency = 0.0;
  double icp_rmse = 0.0;
  int icp_iterations = 0;
  bool icp_converged = false;
};

struct PipelineReport {
  double seg_seconds = 0.0;
  double gen_seconds = 0.0;
  double coarse_seconds = 0.0;
  double icp_seconds = 0.0;
  double assembly_seconds = 0.0;
  double total_seconds = 0.0;
  int parts_total = 0;
  int parts_failed = 0;
  std::vector<PartRecord> parts;

  std::string to_json() const;
};

// Splits jobs into ceil(n / batch_size) contiguous batches in part_id order.
std::vector<std::vector<GenerationJob>> plan_batches(std::vector<GenerationJob> jobs,
                                                     int batch_size);

// Full per-segment pipeline: split by labels, normalize, generate in batches
// (jobs of one batch concurrently in flight), retrieve each part's transform
// against its original segment, and concatenate the transformed parts.
// seg_seconds is the caller-measured segmentation wall time for the report.
std::pair<TriMesh, PipelineReport> generate_parallel(const PointCloud& cloud,
                                                     const SegmentLabels& labels,
                                                     GeneratorBackend& backend,
                                                     const PipelineOptions& opts = {},
                                                     double seg_seconds = 0.0);

// Appends `piece` to `mesh`, offsetting face indices.
void append_mesh(TriMesh& mesh, const TriMesh& piece);

}  // namespace meshrag
