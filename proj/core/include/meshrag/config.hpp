#pragma once

#include <string>
#include <vector>

#include "meshrag/metrics.hpp"
#include "meshrag/registration.hpp"
#include "meshrag/segmentation.hpp"

namespace meshrag {

struct BackendConfig {
  enum class Transport { None, Http, Subprocess };
  Transport transport = Transport::None;
  std::string url;                   // http transport
  std::vector<std::string> command;  // subprocess argv
  double timeout_seconds = 300.0;
};

struct Config {
  BackendConfig backend;
  int batch_size = 8;
  SegmentationParams segmentation;
  IcpParams icp;
  MetricParams metrics;
  std::uint64_t seed = 0;
};

// Parses the JSON config schema; unknown keys are rejected. Throws
// ConfigError on malformed input or out-of-range values.
Config config_from_json_text(const std::string& text);
Config load_config(const std::string& path);

// Fills the backend from MESHRAG_BACKEND_URL when no transport is set.
void apply_env_fallback(Config& config);

// Range and exactly-one-transport checks. Throws ConfigError.
void validate(const Config& config);

std::string config_to_json_text(const Config& config);

}  // namespace meshrag
