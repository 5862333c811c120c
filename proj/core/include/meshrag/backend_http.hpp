#pragma once

#include <string>

#include "meshrag/pipeline.hpp"
#include "meshrag/segmentation.hpp"

namespace meshrag {

// Generator backend over HTTP: POST /generate with the JSON wire schema.
// Each call uses its own connection, so concurrent requests are safe.
class HttpGeneratorBackend : public GeneratorBackend {
 public:
  explicit HttpGeneratorBackend(std::string url, double timeout_seconds = 300.0);

  GenerationResult generate(const GenerationJob& job) override;
  bool deterministic() const override { return false; }

 private:
  std::string url_;
  double timeout_seconds_;
};

// Prompt-segmenter backend over HTTP: POST /segment_prompt.
class HttpSegmenterBackend : public SegmenterBackend {
 public:
  explicit HttpSegmenterBackend(std::string url, double timeout_seconds = 300.0);

  std::array<MaskCandidate, 3> segment_prompt(const PointCloud& cloud,
                                              int prompt_index) override;
  bool deterministic() const override { return false; }

 private:
  std::string url_;
  double timeout_seconds_;
};

}  // namespace meshrag
