#include "meshrag/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshrag/errors.hpp"
#include "meshrag/rng.hpp"

namespace meshrag {

PointCloud sample_surface(const TriMesh& mesh, int n, std::uint64_t seed) {
  if (n < 1) throw BadCountError("sample_surface requires n >= 1");
  if (mesh.empty()) throw EmptyGeometryError("sample_surface on an empty mesh");

  const int nf = static_cast<int>(mesh.faces.size());
  std::vector<double> cumulative(nf);
  std::vector<Vec3> face_normals(nf);
  double total_area = 0.0;
  for (int f = 0; f < nf; ++f) {
    const auto& [i, j, k] = mesh.faces[f];
    const Vec3 e1 = mesh.vertices[j] - mesh.vertices[i];
    const Vec3 e2 = mesh.vertices[k] - mesh.vertices[i];
    const Vec3 cross = e1.cross(e2);
    const double area2 = cross.norm();
    total_area += 0.5 * area2;
    cumulative[f] = total_area;
    face_normals[f] = area2 > 0.0 ? Vec3(cross / area2) : Vec3(0, 0, 1);
  }
  if (total_area <= 0.0) {
    throw EmptyGeometryError("sample_surface: mesh has zero surface area");
  }

  PointCloud out;
  out.positions.reserve(n);
  out.normals.reserve(n);
  Rng rng(seed);
  for (int s = 0; s < n; ++s) {
    const double pick = rng.uniform01() * total_area;
    const int f = static_cast<int>(
        std::lower_bound(cumulative.begin(), cumulative.end(), pick) -
        cumulative.begin());
    const int fi = std::min(f, nf - 1);
    const auto& [i, j, k] = mesh.faces[fi];
    double u = rng.uniform01();
    double v = rng.uniform01();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    out.positions.push_back(mesh.vertices[i] +
                            u * (mesh.vertices[j] - mesh.vertices[i]) +
                            v * (mesh.vertices[k] - mesh.vertices[i]));
    out.normals.push_back(face_normals[fi]);
  }
  return out;
}

std::vector<int> farthest_point_sample_from(std::span<const Vec3> points, int k,
                                            int start_index) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw BadCountError("farthest_point_sample requires 1 <= k <= N");
  if (start_index < 0 || start_index >= n) {
    throw BadCountError("farthest_point_sample start index out of range");
  }

  std::vector<int> picks;
  picks.reserve(k);
  picks.push_back(start_index);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<char> picked(n, 0);
  picked[start_index] = 1;
  for (int step = 1; step < k; ++step) {
    const Vec3& last = points[picks.back()];
    int best = -1;
    double best_d2 = -1.0;
    for (int i = 0; i < n; ++i) {
      const double d = (points[i] - last).squaredNorm();
      if (d < d2[i]) d2[i] = d;
      if (picked[i]) continue;
      // Strict > keeps the lowest index on ties.
      if (d2[i] > best_d2) {
        best_d2 = d2[i];
        best = i;
      }
    }
    picks.push_back(best);
    picked[best] = 1;
  }
  return picks;
}

std::vector<int> farthest_point_sample(std::span<const Vec3> points, int k,
                                       std::uint64_t seed) {
  if (points.empty()) throw BadCountError("farthest_point_sample on an empty cloud");
  Rng rng(seed);
  const int start = static_cast<int>(rng.below(points.size()));
  return farthest_point_sample_from(points, k, start);
}

std::vector<int> farthest_point_sample(const PointCloud& cloud, int k,
                                       std::uint64_t seed) {
  return farthest_point_sample(std::span<const Vec3>(cloud.positions), k, seed);
}

}  // namespace meshrag
