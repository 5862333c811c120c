#pragma once

#include <cstdint>
#include <vector>

#include "meshrag/kdtree.hpp"
#include "meshrag/types.hpp"

namespace meshrag {

struct IcpParams {
  int max_iterations = 50;
  // Correspondence gate as a fraction of the target AABB diagonal.
  double max_correspondence_distance = 0.1;
  // Relative RMSE change below which the solve stops.
  double convergence_tol = 1e-6;
  // Source points sampled from the part mesh.
  int sample_count = 8192;
};

struct RegistrationResult {
  AffineTransform transform;
  double rmse = 0.0;
  int iterations_used = 0;
  bool converged = false;
  // One accepted point-to-plane RMSE per correspondence round, nonincreasing.
  std::vector<double> rmse_trace;
};

// Axis-aligned restore transform: translate the mesh AABB center to the
// origin, scale each axis by the extent ratio, translate to the target
// center. No rotation. A degenerate extent on either side pins that axis
// ratio to 1.
AffineTransform coarse_align(const Aabb& part_mesh_aabb, const Aabb& target_aabb);

// Point-to-plane ICP from an identity initialization. The returned transform
// is rigid: the linear block is orthonormal with determinant +1.
RegistrationResult icp_point_to_plane(const PointCloud& source,
                                      const PointCloud& target,
                                      const NeighborIndex& target_index,
                                      const IcpParams& params = {});
RegistrationResult icp_point_to_plane(const PointCloud& source,
                                      const PointCloud& target,
                                      const IcpParams& params = {});

struct RetrievalResult {
  AffineTransform t_final;    // t_icp * t_restore
  AffineTransform t_restore;  // axis-aligned coarse stage
  // Everything applied after the coarse stage. Rigid when a single solve
  // suffices; folds the re-estimated scale when refinement re-runs.
  AffineTransform t_icp;
  RegistrationResult icp;     // solve behind the accepted refinement
  double coarse_seconds = 0.0;
  double sample_seconds = 0.0;
  double icp_seconds = 0.0;
};

// Restores a normalized part mesh into the target segment's frame: coarse
// AABB alignment, then ICP of a sampled source cloud against the segment.
// When the target is rotated, its bounding box overstates the extents and
// the coarse scale comes out biased; extra passes re-estimate the scale in
// the de-rotated frame and are kept only if they clearly reduce the RMSE.
RetrievalResult retrieve_transform(const TriMesh& part_mesh,
                                   const PointCloud& target_segment,
                                   const IcpParams& params = {},
                                   std::uint64_t seed = 0);

}  // namespace meshrag
