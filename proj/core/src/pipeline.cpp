#include "meshrag/pipeline.hpp"

#include <chrono>

#include <json.hpp>

#include "meshrag/errors.hpp"
#include "meshrag/geometry.hpp"
#include "meshrag/rng.hpp"
#include "meshrag/threading.hpp"

namespace meshrag {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::vector<std::vector<GenerationJob>> plan_batches(std::vector<GenerationJob> jobs,
                                                     int batch_size) {
  if (batch_size < 1) throw BadCountError("batch_size must be >= 1");
  std::vector<std::vector<GenerationJob>> batches;
  std::vector<GenerationJob> current;
  current.reserve(batch_size);
  for (auto& job : jobs) {
    current.push_back(std::move(job));
    if (static_cast<int>(current.size()) == batch_size) {
      batches.push_back(std::move(current));
      current = {};
      current.reserve(batch_size);
    }
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

void append_mesh(TriMesh& mesh, const TriMesh& piece) {
  const int offset = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), piece.vertices.begin(),
                       piece.vertices.end());
  for (const auto& [i, j, k] : piece.faces) {
    mesh.faces.push_back({i + offset, j + offset, k + offset});
  }
}

std::pair<TriMesh, PipelineReport> generate_parallel(const PointCloud& cloud,
                                                     const SegmentLabels& labels,
                                                     GeneratorBackend& backend,
                                                     const PipelineOptions& opts,
                                                     double seg_seconds) {
  if (cloud.empty()) throw EmptyGeometryError("generate_parallel on an empty cloud");
  if (labels.labels.size() != cloud.size()) {
    throw BadCountError("labels do not cover the cloud");
  }
  labels.validate();
  if (labels.n_parts < 1) throw EmptySegmentationError("no parts to generate");

  const auto t_start = Clock::now();
  PipelineReport report;
  report.seg_seconds = seg_seconds;
  report.parts_total = labels.n_parts;

  // Split into original-frame segments; part ids are 1-based labels.
  const bool with_normals = cloud.has_normals();
  std::vector<PointCloud> segments(labels.n_parts);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    PointCloud& seg = segments[labels.labels[i] - 1];
    seg.positions.push_back(cloud.positions[i]);
    if (with_normals) seg.normals.push_back(cloud.normals[i]);
  }

  std::vector<GenerationJob> jobs;
  jobs.reserve(segments.size());
  for (int p = 0; p < labels.n_parts; ++p) {
    GenerationJob job;
    job.part_id = p + 1;
    job.prompt_cloud = normalize_geometry(segments[p]).first;
    job.seed = part_seed(opts.root_seed, job.part_id);
    jobs.push_back(std::move(job));
  }

  report.parts.resize(labels.n_parts);
  for (int p = 0; p < labels.n_parts; ++p) {
    report.parts[p].part_id = p + 1;
    report.parts[p].segment_points = segments[p].size();
  }

  // Generation stage: batches run in sequence, jobs within a batch
  // concurrently in flight.
  std::vector<GenerationResult> results(labels.n_parts);
  std::vector<char> ok(labels.n_parts, 0);
  const auto batches = plan_batches(std::move(jobs), opts.batch_size);
  for (const auto& batch : batches) {
    parallel_for(static_cast<int>(batch.size()), opts.batch_size, [&](int i) {
      const GenerationJob& job = batch[i];
      PartRecord& record = report.parts[job.part_id - 1];
      try {
        GenerationResult res = backend.generate(job);
        record.backend_latency = res.backend_latency;
        results[job.part_id - 1] = std::move(res);
        ok[job.part_id - 1] = 1;
      } catch (const Error& e) {
        record.error = e.what();
      }
    });
  }
  const auto t_gen_done = Clock::now();
  report.gen_seconds = std::chrono::duration<double>(t_gen_done - t_start).count();

  // Retrieval stage: sequential in part order for reproducibility.
  std::vector<AffineTransform> finals(labels.n_parts);
  for (int p = 0; p < labels.n_parts; ++p) {
    if (!ok[p]) continue;
    PartRecord& record = report.parts[p];
    try {
      const RetrievalResult ret = retrieve_transform(
          results[p].mesh, segments[p], opts.icp, part_seed(opts.root_seed, p + 1));
      finals[p] = ret.t_final;
      record.icp_rmse = ret.icp.rmse;
      record.icp_iterations = ret.icp.iterations_used;
      record.icp_converged = ret.icp.converged;
      report.coarse_seconds += ret.coarse_seconds + ret.sample_seconds;
      report.icp_seconds += ret.icp_seconds;
      record.ok = true;
    } catch (const Error& e) {
      ok[p] = 0;
      record.error = e.what();
    }
  }

  // Assembly stage: concatenate transformed parts in part_id order.
  const auto t_assembly = Clock::now();
  TriMesh assembled;
  for (int p = 0; p < labels.n_parts; ++p) {
    if (!ok[p]) {
      ++report.parts_failed;
      continue;
    }
    append_mesh(assembled, apply_transform(finals[p], results[p].mesh));
  }
  report.assembly_seconds = seconds_since(t_assembly);

  if (assembled.empty()) {
    std::string why = "every part failed; nothing to assemble";
    for (const PartRecord& r : report.parts) {
      if (!r.error.empty()) {
        why += " (first error: " + r.error + ")";
        break;
      }
    }
    throw PipelineEmptyError(why);
  }
  report.total_seconds = seg_seconds + seconds_since(t_start);
  return {std::move(assembled), std::move(report)};
}

std::string PipelineReport::to_json() const {
  nlohmann::json j;
  j["stages"] = {{"PC Seg.", seg_seconds},
                 {"Mesh Gen.", gen_seconds},
                 {"Coarse Align.", coarse_seconds},
                 {"ICP Refine.", icp_seconds},
                 {"Assembly", assembly_seconds}};
  j["total_seconds"] = total_seconds;
  j["parts_total"] = parts_total;
  j["parts_failed"] = parts_failed;
  j["parts"] = nlohmann::json::array();
  for (const PartRecord& r : parts) {
    j["parts"].push_back({{"part_id", r.part_id},
                          {"segment_points", r.segment_points},
                          {"ok", r.ok},
                          {"error", r.error},
                          {"backend_latency", r.backend_latency},
                          {"icp_rmse", r.icp_rmse},
                          {"icp_iterations", r.icp_iterations},
                          {"icp_converged", r.icp_converged}});
  }
  return j.dump(2);
}

}  // namespace meshrag
