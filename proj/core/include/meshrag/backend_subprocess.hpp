#pragma once

#include <future>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "meshrag/pipeline.hpp"
#include "meshrag/segmentation.hpp"

namespace meshrag {

// Backend over a worker subprocess speaking newline-delimited JSON: one
// request per line on its stdin, one response per line on its stdout,
// matched by part_id. Requests from several threads interleave safely; a
// reader thread routes responses to the issuing callers.
class SubprocessBackend : public GeneratorBackend, public SegmenterBackend {
 public:
  explicit SubprocessBackend(std::vector<std::string> argv,
                             double timeout_seconds = 300.0);
  ~SubprocessBackend() override;

  SubprocessBackend(const SubprocessBackend&) = delete;
  SubprocessBackend& operator=(const SubprocessBackend&) = delete;

  GenerationResult generate(const GenerationJob& job) override;
  std::array<MaskCandidate, 3> segment_prompt(const PointCloud& cloud,
                                              int prompt_index) override;
  bool deterministic() const override { return false; }

 private:
  std::string roundtrip(int wire_id, const std::string& line);
  void reader_loop();
  int next_wire_id();

  double timeout_seconds_;
  int pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;

  std::thread reader_;
  std::mutex write_mu_;
  std::mutex pending_mu_;
  std::map<int, std::promise<std::string>> pending_;
  bool dead_ = false;
  std::string death_reason_;
  // Wire ids for segment_prompt requests live far above realistic part ids.
  int segment_counter_ = 1000000000;
};

}  // namespace meshrag
