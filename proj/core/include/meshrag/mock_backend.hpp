#pragma once

#include <map>
#include <vector>

#include "meshrag/meshdist.hpp"
#include "meshrag/pipeline.hpp"

namespace meshrag {

// Test double for the mesh generator: returns normalized ground-truth parts
// from a configured library. Matching is by part_id, or by geometry when the
// caller's part numbering cannot be assumed (labels from segmentation are
// arbitrary). Optional jitter exercises the ICP stage; optional fixed latency
// and fault injection exercise scheduling and failure paths.
class MockOracleBackend : public GeneratorBackend {
 public:
  enum class Match { ById, ByGeometry };

  struct Options {
    Match match = Match::ById;
    bool jitter = false;
    double max_rotation_deg = 5.0;
    double noise_sigma = 0.002;
    double latency_seconds = 0.0;
    std::vector<int> fail_parts;
  };

  MockOracleBackend() : MockOracleBackend(Options{}) {}
  explicit MockOracleBackend(Options options);

  // Stores the part normalized to the unit convention.
  void add_part(int part_id, const TriMesh& mesh);

  GenerationResult generate(const GenerationJob& job) override;
  bool deterministic() const override { return true; }

 private:
  const TriMesh& lookup(const GenerationJob& job) const;

  Options options_;
  std::map<int, TriMesh> parts_;
  // Geometry matching scores the prompt cloud against each part's exact
  // normalized surface, so similar parts stay distinguishable below the
  // sampling noise floor.
  std::map<int, TriangleBvh> surfaces_;
};

}  // namespace meshrag
