// Microbenchmarks for the hot paths: sampling, neighbor queries, metrics,
// registration, and the zero-latency pipeline.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "meshrag/geometry.hpp"
#include "meshrag/kdtree.hpp"
#include "meshrag/meshdist.hpp"
#include "meshrag/metrics.hpp"
#include "meshrag/mock_backend.hpp"
#include "meshrag/pipeline.hpp"
#include "meshrag/registration.hpp"
#include "meshrag/rng.hpp"
#include "meshrag/sampling.hpp"
#include "meshrag/types.hpp"

namespace {

using namespace meshrag;

PointCloud random_cloud(int n, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud cloud;
  for (int i = 0; i < n; ++i) {
    cloud.positions.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                 rng.uniform(-1.0, 1.0));
    Vec3 normal(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    while (normal.norm() < 1e-6) {
      normal = Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    cloud.normals.push_back(normal.normalized());
  }
  return cloud;
}

TriMesh uv_sphere(const Vec3& center, double radius, int rings = 32, int segments = 48) {
  TriMesh mesh;
  mesh.vertices.push_back(center + Vec3(0, 0, radius));
  for (int r = 1; r < rings; ++r) {
    const double theta = std::numbers::pi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      mesh.vertices.push_back(center + radius * Vec3(std::sin(theta) * std::cos(phi),
                                                     std::sin(theta) * std::sin(phi),
                                                     std::cos(theta)));
    }
  }
  mesh.vertices.push_back(center + Vec3(0, 0, -radius));
  const int bottom = static_cast<int>(mesh.vertices.size()) - 1;
  auto ring_vertex = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) {
    mesh.faces.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  }
  for (int r = 1; r < rings - 1; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const int c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      mesh.faces.push_back({a, c, d});
      mesh.faces.push_back({a, d, b});
    }
  }
  for (int s = 0; s < segments; ++s) {
    mesh.faces.push_back({bottom, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
  }
  return mesh;
}

void BM_FarthestPointSample(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(farthest_point_sample(cloud, 64, 0));
  }
}
BENCHMARK(BM_FarthestPointSample)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_KdTreeBuild(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    NeighborIndex index(cloud);
    benchmark::DoNotOptimize(index);
  }
}
BENCHMARK(BM_KdTreeBuild)->Arg(4096)->Arg(32768);

void BM_KdTreeNearest(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<int>(state.range(0)), 3);
  const NeighborIndex index(cloud);
  const PointCloud queries = random_cloud(1024, 4);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.nearest(queries.positions[i++ % queries.size()]));
  }
}
BENCHMARK(BM_KdTreeNearest)->Arg(4096)->Arg(65536);

void BM_Chamfer(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointCloud a = random_cloud(n, 5);
  const PointCloud b = random_cloud(n, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chamfer(a, b));
  }
}
BENCHMARK(BM_Chamfer)->Arg(2048)->Arg(8192);

void BM_TriangleBvhDistance(benchmark::State& state) {
  const TriMesh mesh = uv_sphere(Vec3::Zero(), 0.8);
  const TriangleBvh bvh(mesh);
  const PointCloud queries = random_cloud(1024, 7);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bvh.distance(queries.positions[i++ % queries.size()]));
  }
}
BENCHMARK(BM_TriangleBvhDistance);

void BM_IcpPointToPlane(benchmark::State& state) {
  const TriMesh mesh = uv_sphere(Vec3(0.1, -0.05, 0.2), 0.7);
  const PointCloud target = sample_surface(mesh, static_cast<int>(state.range(0)), 8);
  const PointCloud source = sample_surface(mesh, static_cast<int>(state.range(0)), 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(icp_point_to_plane(source, target));
  }
}
BENCHMARK(BM_IcpPointToPlane)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_PipelineZeroLatency(benchmark::State& state) {
  std::vector<TriMesh> parts;
  PointCloud cloud;
  std::vector<int> labels_raw;
  for (int p = 0; p < 4; ++p) {
    parts.push_back(uv_sphere(Vec3(1.8 * p, 0, 0), 0.6, 16, 24));
    const PointCloud pts = sample_surface(parts.back(), 800, 10 + static_cast<std::uint64_t>(p));
    cloud.positions.insert(cloud.positions.end(), pts.positions.begin(), pts.positions.end());
    cloud.normals.insert(cloud.normals.end(), pts.normals.begin(), pts.normals.end());
    labels_raw.insert(labels_raw.end(), pts.size(), p + 1);
  }
  const SegmentLabels labels{labels_raw, 4};
  MockOracleBackend backend;
  for (int p = 0; p < 4; ++p) backend.add_part(p + 1, parts[static_cast<std::size_t>(p)]);
  PipelineOptions opts;
  opts.batch_size = 4;
  opts.icp.sample_count = 2048;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_parallel(cloud, labels, backend, opts));
  }
}
BENCHMARK(BM_PipelineZeroLatency)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
