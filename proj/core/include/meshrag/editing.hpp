#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "meshrag/pipeline.hpp"
#include "meshrag/registration.hpp"
#include "meshrag/segmentation.hpp"
#include "meshrag/types.hpp"

namespace meshrag {

struct EditRequest {
  TriMesh initial_mesh;
  PointCloud edited_cloud;
  // Distance past which an edited point counts as new geometry. <= 0 selects
  // the default: 0.02 of the edited cloud's AABB diagonal.
  double residual_threshold = 0.0;
  IcpParams icp;
  SegmentationParams segmentation;
};

struct EditReport {
  AffineTransform alignment;
  double residual_threshold = 0.0;
  std::size_t residual_points = 0;
  int generated_parts = 0;
  bool no_change = false;
  PipelineReport pipeline;  // default-initialized when no_change

  std::string to_json() const;
};

// Registers the initial mesh against the edited cloud and returns the
// alignment transform (the full retrieval transform: coarse then ICP).
// A mesh that already fits the cloud at least as well as the retrieved pose
// gets the exact identity, so repeated edits do not accumulate solver noise.
AffineTransform align_initial(const TriMesh& initial_mesh,
                              const PointCloud& edited_cloud,
                              const IcpParams& icp = {}, std::uint64_t seed = 0);

// Points of the edited cloud farther than eps_res from the aligned initial
// mesh's surface.
PointCloud extract_residual(const PointCloud& edited_cloud,
                            const TriMesh& aligned_initial_mesh, double eps_res);

// Full incremental edit: align, subtract, segment the residual, generate the
// new parts, and merge them with the aligned initial mesh. An empty residual
// returns the aligned initial mesh unchanged with a no-op report.
std::pair<TriMesh, EditReport> edit_incremental(const EditRequest& request,
                                                GeneratorBackend& backend,
                                                SegmenterBackend& segmenter,
                                                const PipelineOptions& opts = {});

}  // namespace meshrag
