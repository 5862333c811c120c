#include "test_support.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Geometry>

#include "meshrag/rng.hpp"
#include "meshrag/sampling.hpp"

namespace meshrag::testing {

namespace {

double signed_volume(const TriMesh& mesh) {
  double v = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    v += a.dot(b.cross(c)) / 6.0;
  }
  return v;
}

void ensure_outward(TriMesh& mesh) {
  if (signed_volume(mesh) < 0.0) {
    for (auto& f : mesh.faces) std::swap(f[1], f[2]);
  }
}

// Shared lat/long tessellation with a caller-supplied radius field.
template <typename RadiusFn>
TriMesh lat_long_surface(const Vec3& center, RadiusFn&& radius_at, int rings,
                         int segments) {
  TriMesh mesh;
  const auto dir = [](double theta, double phi) {
    return Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                std::cos(theta));
  };
  mesh.vertices.push_back(center + radius_at(0.0, 0.0) * dir(0.0, 0.0));
  for (int i = 1; i < rings; ++i) {
    const double theta = std::numbers::pi * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / segments;
      mesh.vertices.push_back(center + radius_at(theta, phi) * dir(theta, phi));
    }
  }
  mesh.vertices.push_back(center +
                          radius_at(std::numbers::pi, 0.0) * dir(std::numbers::pi, 0.0));

  const int bottom = static_cast<int>(mesh.vertices.size()) - 1;
  const auto ring = [&](int i, int j) { return 1 + (i - 1) * segments + (j % segments); };
  for (int j = 0; j < segments; ++j) {
    mesh.faces.push_back({0, ring(1, j), ring(1, j + 1)});
  }
  for (int i = 1; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      mesh.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      mesh.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  for (int j = 0; j < segments; ++j) {
    mesh.faces.push_back({bottom, ring(rings - 1, j + 1), ring(rings - 1, j)});
  }
  ensure_outward(mesh);
  return mesh;
}

Vec3 random_unit(Rng& rng) {
  while (true) {
    const Vec3 v(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const double n2 = v.squaredNorm();
    if (n2 > 1e-6 && n2 <= 1.0) return v / std::sqrt(n2);
  }
}

}  // namespace

TriMesh make_box(const Vec3& center, const Vec3& half_extents) {
  TriMesh mesh;
  for (int corner = 0; corner < 8; ++corner) {
    mesh.vertices.push_back(center + Vec3((corner & 1) ? half_extents.x() : -half_extents.x(),
                                          (corner & 2) ? half_extents.y() : -half_extents.y(),
                                          (corner & 4) ? half_extents.z() : -half_extents.z()));
  }
  mesh.faces = {
      {0, 2, 3}, {0, 3, 1},  // z-
      {4, 5, 7}, {4, 7, 6},  // z+
      {0, 1, 5}, {0, 5, 4},  // y-
      {2, 6, 7}, {2, 7, 3},  // y+
      {0, 4, 6}, {0, 6, 2},  // x-
      {1, 3, 7}, {1, 7, 5},  // x+
  };
  ensure_outward(mesh);
  return mesh;
}

TriMesh make_sphere(const Vec3& center, double radius, int rings, int segments) {
  return lat_long_surface(center, [&](double, double) { return radius; }, rings,
                          segments);
}

TriMesh make_ellipsoid(const Vec3& center, const Vec3& radii, int rings, int segments) {
  TriMesh mesh = make_sphere(Vec3::Zero(), 1.0, rings, segments);
  for (auto& v : mesh.vertices) v = center + Vec3(v.x() * radii.x(), v.y() * radii.y(), v.z() * radii.z());
  return mesh;
}

TriMesh make_torus(const Vec3& center, double major_radius, double minor_radius,
                   int major_segments, int minor_segments) {
  TriMesh mesh;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * std::numbers::pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * std::numbers::pi * j / minor_segments;
      const double w = major_radius + minor_radius * std::cos(v);
      mesh.vertices.push_back(center + Vec3(w * std::cos(u), w * std::sin(u),
                                            minor_radius * std::sin(v)));
    }
  }
  const auto at = [&](int i, int j) {
    return (i % major_segments) * minor_segments + (j % minor_segments);
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      mesh.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      mesh.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  ensure_outward(mesh);
  return mesh;
}

TriMesh make_bumpy_sphere(const Vec3& center, double radius, double bump_amp,
                          int bump_freq, int rings, int segments) {
  return lat_long_surface(
      center,
      [&](double theta, double phi) {
        return radius * (1.0 + bump_amp * std::sin(bump_freq * theta) *
                                   std::cos(bump_freq * phi));
      },
      rings, segments);
}

TriMesh make_blob(std::uint64_t seed, const Vec3& center, double radius) {
  Rng rng(seed ^ 0xb10bULL);
  const double amp = 0.02 + 0.03 * rng.uniform01();
  const int freq = 2 + static_cast<int>(rng.below(2));
  const Vec3 stretch(1.0 + 0.15 * rng.uniform01(), 1.0 + 0.15 * rng.uniform01(),
                     1.0 + 0.15 * rng.uniform01());
  TriMesh mesh = make_bumpy_sphere(Vec3::Zero(), 1.0, amp, freq);
  double max_half = 0.0;
  for (auto& v : mesh.vertices) {
    v = Vec3(v.x() * stretch.x(), v.y() * stretch.y(), v.z() * stretch.z());
    max_half = std::max({max_half, std::abs(v.x()), std::abs(v.y()), std::abs(v.z())});
  }
  const double scale = radius / max_half;
  for (auto& v : mesh.vertices) v = center + scale * v;
  return mesh;
}

PointCloud sphere_surface_cloud(const Vec3& center, double radius, int n) {
  PointCloud cloud;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    const Vec3 dir(r * std::cos(phi), r * std::sin(phi), z);
    cloud.positions.push_back(center + radius * dir);
    cloud.normals.push_back(dir);
  }
  return cloud;
}

PointCloud plane_cloud(int nx, int ny, double spacing, double height) {
  PointCloud cloud;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      cloud.positions.emplace_back(x * spacing, y * spacing, height);
      cloud.normals.emplace_back(0.0, 0.0, 1.0);
    }
  }
  return cloud;
}

PointCloud random_cloud(int n, std::uint64_t seed, bool with_normals) {
  Rng rng(seed);
  PointCloud cloud;
  for (int i = 0; i < n; ++i) {
    cloud.positions.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                 rng.uniform(-1.0, 1.0));
  }
  if (with_normals) {
    for (int i = 0; i < n; ++i) cloud.normals.push_back(random_unit(rng));
  }
  return cloud;
}

int brute_nearest(const std::vector<Vec3>& points, const Vec3& query) {
  int best = -1;
  double best_d2 = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d2 = (points[i] - query).squaredNorm();
    if (best < 0 || d2 < best_d2) {
      best = static_cast<int>(i);
      best_d2 = d2;
    }
  }
  return best;
}

std::vector<int> brute_knn(const std::vector<Vec3>& points, const Vec3& query, int k) {
  std::vector<std::pair<double, int>> all;
  for (std::size_t i = 0; i < points.size(); ++i) {
    all.emplace_back((points[i] - query).squaredNorm(), static_cast<int>(i));
  }
  std::sort(all.begin(), all.end());
  const std::size_t take = std::min<std::size_t>(k, all.size());
  std::vector<int> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(all[i].second);
  return out;
}

std::vector<int> brute_fps(const std::vector<Vec3>& points, int k, int start) {
  const std::size_t n = points.size();
  std::vector<int> picked{start};
  std::vector<char> taken(n, 0);
  taken[start] = 1;
  std::vector<double> min_d2(n);
  for (std::size_t i = 0; i < n; ++i) min_d2[i] = (points[i] - points[start]).squaredNorm();

  while (static_cast<int>(picked.size()) < k) {
    int best = -1;
    double best_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i] && min_d2[i] > best_d2) {
        best = static_cast<int>(i);
        best_d2 = min_d2[i];
      }
    }
    picked.push_back(best);
    taken[best] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      min_d2[i] = std::min(min_d2[i], (points[i] - points[best]).squaredNorm());
    }
  }
  return picked;
}

namespace {

std::vector<double> brute_nn_distances(const PointCloud& from, const PointCloud& to) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const Vec3& p : from.positions) {
    double best = (to.positions[0] - p).squaredNorm();
    for (std::size_t j = 1; j < to.size(); ++j) {
      best = std::min(best, (to.positions[j] - p).squaredNorm());
    }
    out.push_back(std::sqrt(best));
  }
  return out;
}

double vec_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double vec_rms(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

BruteChamfer brute_chamfer(const PointCloud& a, const PointCloud& b) {
  const std::vector<double> dab = brute_nn_distances(a, b);
  const std::vector<double> dba = brute_nn_distances(b, a);
  return {0.5 * (vec_mean(dab) + vec_mean(dba)), 0.5 * (vec_rms(dab) + vec_rms(dba))};
}

double brute_hausdorff(const PointCloud& a, const PointCloud& b) {
  const std::vector<double> dab = brute_nn_distances(a, b);
  const std::vector<double> dba = brute_nn_distances(b, a);
  double m = 0.0;
  for (double x : dab) m = std::max(m, x);
  for (double x : dba) m = std::max(m, x);
  return m;
}

double brute_normal_consistency(const PointCloud& a, const PointCloud& b) {
  double acc_ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int j = brute_nearest(b.positions, a.positions[i]);
    acc_ab += std::abs(a.normals[i].dot(b.normals[j]));
  }
  double acc_ba = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const int j = brute_nearest(a.positions, b.positions[i]);
    acc_ba += std::abs(b.normals[i].dot(a.normals[j]));
  }
  return 0.5 * (acc_ab / static_cast<double>(a.size()) +
                acc_ba / static_cast<double>(b.size()));
}

double brute_fscore(const PointCloud& a, const PointCloud& b, double tau) {
  std::size_t hits_a = 0;
  for (double d : brute_nn_distances(a, b)) {
    if (d <= tau) ++hits_a;
  }
  std::size_t hits_b = 0;
  for (double d : brute_nn_distances(b, a)) {
    if (d <= tau) ++hits_b;
  }
  const double precision = static_cast<double>(hits_a) / static_cast<double>(a.size());
  const double recall = static_cast<double>(hits_b) / static_cast<double>(b.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double analytic_box_iou(const Vec3& ca, const Vec3& ha, const Vec3& cb, const Vec3& hb) {
  double inter = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = std::max(ca[axis] - ha[axis], cb[axis] - hb[axis]);
    const double hi = std::min(ca[axis] + ha[axis], cb[axis] + hb[axis]);
    inter *= std::max(0.0, hi - lo);
  }
  const double va = 8.0 * ha.prod();
  const double vb = 8.0 * hb.prod();
  return inter / (va + vb - inter);
}

AffineTransform rotation_about(const Vec3& axis, double degrees, const Vec3& pivot) {
  const Eigen::AngleAxisd aa(degrees * std::numbers::pi / 180.0, axis.normalized());
  const Mat3 r = aa.toRotationMatrix();
  return AffineTransform::from_parts(r, pivot - r * pivot);
}

TriMesh Scene::combined_mesh() const {
  TriMesh all;
  for (const auto& part : parts) {
    const int offset = static_cast<int>(all.vertices.size());
    all.vertices.insert(all.vertices.end(), part.mesh.vertices.begin(),
                        part.mesh.vertices.end());
    for (const auto& f : part.mesh.faces) {
      all.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
    }
  }
  return all;
}

namespace {

std::vector<Vec3> scene_slots(Rng& rng, int n_parts, double spacing) {
  std::vector<Vec3> slots;
  for (int corner = 0; corner < 8; ++corner) {
    slots.emplace_back((corner & 1) ? spacing : 0.0, (corner & 2) ? spacing : 0.0,
                       (corner & 4) ? spacing : 0.0);
  }
  for (std::size_t i = slots.size(); i > 1; --i) {
    std::swap(slots[i - 1], slots[rng.below(i)]);
  }
  slots.resize(n_parts);
  for (auto& s : slots) {
    s += Vec3(rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08),
              rng.uniform(-0.08, 0.08));
  }
  return slots;
}

Scene assemble_scene(std::vector<TriMesh> meshes, int points_per_part,
                     std::uint64_t seed) {
  Scene scene;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    ScenePart part;
    part.mesh = std::move(meshes[i]);
    part.points = sample_surface(part.mesh, points_per_part, seed ^ (0x5A11 + i));
    scene.parts.push_back(std::move(part));
  }
  for (std::size_t i = 0; i < scene.parts.size(); ++i) {
    const PointCloud& pts = scene.parts[i].points;
    scene.cloud.positions.insert(scene.cloud.positions.end(), pts.positions.begin(),
                                 pts.positions.end());
    scene.cloud.normals.insert(scene.cloud.normals.end(), pts.normals.begin(),
                               pts.normals.end());
    scene.gt_labels.insert(scene.gt_labels.end(), pts.size(), static_cast<int>(i) + 1);
  }
  return scene;
}

}  // namespace

Scene make_primitive_scene(std::uint64_t seed, int n_parts, int points_per_part) {
  Rng rng(seed ^ 0x5ce9eULL);
  const std::vector<Vec3> slots = scene_slots(rng, n_parts, 1.7);
  std::vector<TriMesh> meshes;
  for (const Vec3& slot : slots) {
    switch (rng.below(3)) {
      case 0:
        meshes.push_back(make_sphere(slot, rng.uniform(0.28, 0.45)));
        break;
      case 1:
        meshes.push_back(make_ellipsoid(
            slot, Vec3(rng.uniform(0.25, 0.45), rng.uniform(0.25, 0.45),
                       rng.uniform(0.25, 0.45))));
        break;
      default:
        meshes.push_back(make_torus(slot, rng.uniform(0.26, 0.34),
                                    rng.uniform(0.09, 0.12)));
        break;
    }
  }
  return assemble_scene(std::move(meshes), points_per_part, seed);
}

Scene make_blob_scene(std::uint64_t seed, int n_parts, int points_per_part) {
  Rng rng(seed ^ 0xb10b5ULL);
  const std::vector<Vec3> slots = scene_slots(rng, n_parts, 1.7);
  std::vector<TriMesh> meshes;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    meshes.push_back(make_blob(seed * 1315423911ULL + i, slots[i],
                               rng.uniform(0.22, 0.35)));
  }
  return assemble_scene(std::move(meshes), points_per_part, seed);
}

double min_label_iou(const std::vector<int>& predicted, const std::vector<int>& gt,
                     int n_gt_parts) {
  int max_pred = 0;
  for (int p : predicted) max_pred = std::max(max_pred, p);
  double worst = 1.0;
  for (int g = 1; g <= n_gt_parts; ++g) {
    double best = 0.0;
    for (int p = 1; p <= max_pred; ++p) {
      std::size_t inter = 0, uni = 0;
      for (std::size_t i = 0; i < gt.size(); ++i) {
        const bool in_g = gt[i] == g;
        const bool in_p = predicted[i] == p;
        inter += in_g && in_p;
        uni += in_g || in_p;
      }
      if (uni > 0) best = std::max(best, static_cast<double>(inter) / uni);
    }
    worst = std::min(worst, best);
  }
  return worst;
}

TempDir::TempDir() {
  char pattern[] = "/tmp/meshrag_test_XXXXXX";
  const char* created = mkdtemp(pattern);
  if (created == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = created;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

RunResult run_command(const std::string& command) {
  RunResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed: " + command);
  char buffer[4096];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, got);
  }
  const int status = pclose(pipe);
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace meshrag::testing
