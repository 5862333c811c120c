#include "meshrag/registration.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <limits>

#include "meshrag/errors.hpp"
#include "meshrag/geometry.hpp"
#include "meshrag/sampling.hpp"

namespace meshrag {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool degenerate_extent(double extent, double longest) {
  return extent <= 1e-9 * std::max(longest, 1e-30);
}

Mat3 project_to_so3(const Mat3& m) {
  const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

struct Correspondence {
  Vec3 source;  // source point in the current frame
  Vec3 target;
  Vec3 normal;
};

}  // namespace

AffineTransform coarse_align(const Aabb& part_mesh_aabb, const Aabb& target_aabb) {
  const double longest_m = part_mesh_aabb.longest_extent();
  const double longest_t = target_aabb.longest_extent();
  Vec3 scale;
  for (int a = 0; a < 3; ++a) {
    const double em = part_mesh_aabb.extents[a];
    const double et = target_aabb.extents[a];
    if (degenerate_extent(em, longest_m) || degenerate_extent(et, longest_t)) {
      scale[a] = 1.0;
    } else {
      scale[a] = et / em;
    }
  }
  return AffineTransform::translation(target_aabb.center) *
         AffineTransform::scaling(scale) *
         AffineTransform::translation(-part_mesh_aabb.center);
}

RegistrationResult icp_point_to_plane(const PointCloud& source,
                                      const PointCloud& target,
                                      const NeighborIndex& target_index,
                                      const IcpParams& params) {
  if (source.empty() || target.empty()) {
    throw EmptyGeometryError("icp_point_to_plane on an empty cloud");
  }
  if (!target.has_normals()) {
    throw NoNormalsError("icp_point_to_plane requires target normals");
  }
  if (params.max_iterations < 1 || params.convergence_tol <= 0.0 ||
      params.convergence_tol >= 1.0 || params.max_correspondence_distance <= 0.0) {
    throw BadCountError("invalid ICP parameters");
  }

  const double max_dist =
      params.max_correspondence_distance * compute_aabb(target).diagonal();

  Mat3 rot = Mat3::Identity();
  Vec3 trans = Vec3::Zero();
  Mat3 rot_accepted = rot;
  Vec3 trans_accepted = trans;
  double rmse_accepted = std::numeric_limits<double>::infinity();
  bool have_accepted = false;

  RegistrationResult result;
  std::vector<Correspondence> corr;
  corr.reserve(source.size());

  for (int iter = 1; iter <= params.max_iterations; ++iter) {
    corr.clear();
    double sq_sum = 0.0;
    for (const Vec3& s : source.positions) {
      const Vec3 moved = rot * s + trans;
      const auto hit = target_index.nearest_within(moved, max_dist);
      if (!hit) continue;
      const Vec3& t = target.positions[hit->index];
      const Vec3& n = target.normals[hit->index];
      corr.push_back({moved, t, n});
      const double r = (moved - t).dot(n);
      sq_sum += r * r;
    }
    if (corr.empty()) {
      if (!have_accepted) {
        throw NoCorrespondencesError(
            "no correspondences within the gate at the initial pose");
      }
      rot = rot_accepted;
      trans = trans_accepted;
      break;
    }

    const double rmse = std::sqrt(sq_sum / static_cast<double>(corr.size()));
    result.iterations_used = iter;

    if (have_accepted && rmse > rmse_accepted + 1e-15) {
      // A worse step means the accepted pose is a fixed point of the solve:
      // no further progress is possible, which is convergence, not failure.
      rot = rot_accepted;
      trans = trans_accepted;
      result.converged = true;
      break;
    }
    const double improvement =
        have_accepted ? (rmse_accepted - rmse) / std::max(rmse_accepted, 1e-300)
                      : std::numeric_limits<double>::infinity();
    rot_accepted = rot;
    trans_accepted = trans;
    rmse_accepted = rmse;
    have_accepted = true;
    result.rmse_trace.push_back(rmse);

    if (rmse <= 1e-14 || improvement <= params.convergence_tol) {
      result.converged = true;
      break;
    }
    if (iter == params.max_iterations) break;

    // Linearized point-to-plane solve: residual r_i = (q_i - s_i)·n_i,
    // Jacobian row J_i = [s_i × n_i ; n_i] for the twist (ω, t).
    Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
    for (const Correspondence& c : corr) {
      Eigen::Matrix<double, 6, 1> jac;
      jac.head<3>() = c.source.cross(c.normal);
      jac.tail<3>() = c.normal;
      const double r = (c.target - c.source).dot(c.normal);
      a += jac * jac.transpose();
      b += jac * r;
    }
    const Eigen::Matrix<double, 6, 1> x = a.ldlt().solve(b);
    const Vec3 omega = x.head<3>();
    const Vec3 dt = x.tail<3>();
    Mat3 rot_delta = Mat3::Identity();
    const double angle = omega.norm();
    if (angle > 1e-18) {
      rot_delta = Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
    }
    rot = project_to_so3(rot_delta * rot);
    trans = rot_delta * trans + dt;
  }

  result.transform = AffineTransform::from_parts(rot, trans);
  result.rmse = rmse_accepted;
  return result;
}

RegistrationResult icp_point_to_plane(const PointCloud& source,
                                      const PointCloud& target,
                                      const IcpParams& params) {
  const NeighborIndex index(target);
  return icp_point_to_plane(source, target, index, params);
}

RetrievalResult retrieve_transform(const TriMesh& part_mesh,
                                   const PointCloud& target_segment,
                                   const IcpParams& params, std::uint64_t seed) {
  if (part_mesh.empty()) {
    throw DegenerateExtentError("retrieve_transform on an empty part mesh");
  }
  if (target_segment.empty()) {
    throw EmptyGeometryError("retrieve_transform on an empty target segment");
  }

  RetrievalResult out;

  auto t0 = Clock::now();
  const Aabb part_aabb = compute_aabb(part_mesh);
  out.t_restore = coarse_align(part_aabb, compute_aabb(target_segment));
  out.coarse_seconds = seconds_since(t0);

  t0 = Clock::now();
  const PointCloud source = sample_surface(part_mesh, params.sample_count, seed);
  const PointCloud placed = apply_transform(out.t_restore, source);
  out.sample_seconds = seconds_since(t0);

  t0 = Clock::now();
  const NeighborIndex target_index(target_segment);
  out.icp = icp_point_to_plane(placed, target_segment, target_index, params);
  out.t_icp = out.icp.transform;
  out.t_final = out.t_icp * out.t_restore;

  // A rotated target inflates its bounding box, so the axis-aligned coarse
  // scale is biased and the rigid solve cannot undo it. Once a pass has
  // exposed the rotation, re-estimate the scale against the de-rotated
  // target and solve again, keeping passes that improve the fit decisively.
  for (int pass = 1; pass < 3 && out.icp.rmse > 1e-14; ++pass) {
    const Mat3 rotation = project_to_so3(out.t_final.linear());
    std::vector<Vec3> derotated;
    derotated.reserve(target_segment.size());
    for (const Vec3& p : target_segment.positions) {
      derotated.push_back(rotation.transpose() * p);
    }
    const AffineTransform restore =
        AffineTransform::from_parts(rotation, Vec3::Zero()) *
        coarse_align(part_aabb, compute_aabb(derotated));
    RegistrationResult refit;
    try {
      refit = icp_point_to_plane(apply_transform(restore, source), target_segment,
                                 target_index, params);
    } catch (const NoCorrespondencesError&) {
      break;
    }
    if (refit.rmse >= 0.9 * out.icp.rmse) break;
    out.icp = refit;
    out.t_final = refit.transform * restore;
    out.t_icp = out.t_final * out.t_restore.inverse();
  }
  out.icp_seconds = seconds_since(t0);
  return out;
}

}  // namespace meshrag
