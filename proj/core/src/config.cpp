#include "meshrag/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "meshrag/errors.hpp"

namespace meshrag {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown config key '" + key + "' in " + where);
  }
}

}  // namespace

Config config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  Config config;
  try {
    reject_unknown(j, {"backend", "batch_size", "segmentation", "icp", "metrics", "seed"},
                   "the top level");
    if (j.contains("backend")) {
      const json& b = j["backend"];
      reject_unknown(b, {"url", "command", "timeout_seconds"}, "backend");
      if (b.contains("url")) {
        config.backend.transport = BackendConfig::Transport::Http;
        config.backend.url = b["url"].get<std::string>();
      }
      if (b.contains("command")) {
        if (config.backend.transport != BackendConfig::Transport::None) {
          throw ConfigError("backend.url and backend.command are mutually exclusive");
        }
        config.backend.transport = BackendConfig::Transport::Subprocess;
        config.backend.command = b["command"].get<std::vector<std::string>>();
      }
      config.backend.timeout_seconds =
          b.value("timeout_seconds", config.backend.timeout_seconds);
    }
    config.batch_size = j.value("batch_size", config.batch_size);
    if (j.contains("segmentation")) {
      const json& s = j["segmentation"];
      reject_unknown(s, {"n_prompts", "tau_nms", "tau_merge", "tau_recover"},
                     "segmentation");
      config.segmentation.n_prompts = s.value("n_prompts", config.segmentation.n_prompts);
      config.segmentation.tau_nms = s.value("tau_nms", config.segmentation.tau_nms);
      config.segmentation.tau_merge = s.value("tau_merge", config.segmentation.tau_merge);
      config.segmentation.tau_recover =
          s.value("tau_recover", config.segmentation.tau_recover);
    }
    if (j.contains("icp")) {
      const json& i = j["icp"];
      reject_unknown(i,
                     {"max_iterations", "max_correspondence_distance",
                      "convergence_tol", "sample_count"},
                     "icp");
      config.icp.max_iterations = i.value("max_iterations", config.icp.max_iterations);
      config.icp.max_correspondence_distance = i.value(
          "max_correspondence_distance", config.icp.max_correspondence_distance);
      config.icp.convergence_tol = i.value("convergence_tol", config.icp.convergence_tol);
      config.icp.sample_count = i.value("sample_count", config.icp.sample_count);
    }
    if (j.contains("metrics")) {
      const json& m = j["metrics"];
      reject_unknown(m, {"sample_count", "tau_f1", "edge_k", "edge_angle_deg"},
                     "metrics");
      config.metrics.sample_count = m.value("sample_count", config.metrics.sample_count);
      config.metrics.tau_f1 = m.value("tau_f1", config.metrics.tau_f1);
      config.metrics.edge_k = m.value("edge_k", config.metrics.edge_k);
      config.metrics.edge_angle_deg =
          m.value("edge_angle_deg", config.metrics.edge_angle_deg);
    }
    config.seed = j.value("seed", config.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }

  validate(config);
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json_text(text.str());
}

void apply_env_fallback(Config& config) {
  if (config.backend.transport != BackendConfig::Transport::None) return;
  const char* url = std::getenv("MESHRAG_BACKEND_URL");
  if (url != nullptr && url[0] != '\0') {
    config.backend.transport = BackendConfig::Transport::Http;
    config.backend.url = url;
  }
}

void validate(const Config& config) {
  const auto& b = config.backend;
  if (b.transport == BackendConfig::Transport::Http && b.url.empty()) {
    throw ConfigError("http transport needs a nonempty url");
  }
  if (b.transport == BackendConfig::Transport::Subprocess && b.command.empty()) {
    throw ConfigError("subprocess transport needs a nonempty command");
  }
  if (b.timeout_seconds <= 0.0) throw ConfigError("timeout_seconds must be positive");
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");

  const auto& s = config.segmentation;
  if (s.n_prompts < 1) throw ConfigError("n_prompts must be >= 1");
  auto check_tau = [](double tau, const char* name) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw ConfigError(std::string(name) + " must lie in (0, 1)");
    }
  };
  check_tau(s.tau_nms, "tau_nms");
  check_tau(s.tau_merge, "tau_merge");
  check_tau(s.tau_recover, "tau_recover");

  const auto& i = config.icp;
  if (i.max_iterations < 1) throw ConfigError("icp.max_iterations must be >= 1");
  if (i.max_correspondence_distance <= 0.0) {
    throw ConfigError("icp.max_correspondence_distance must be positive");
  }
  if (!(i.convergence_tol > 0.0 && i.convergence_tol < 1.0)) {
    throw ConfigError("icp.convergence_tol must lie in (0, 1)");
  }
  if (i.sample_count < 1) throw ConfigError("icp.sample_count must be >= 1");

  const auto& m = config.metrics;
  if (m.sample_count < 1) throw ConfigError("metrics.sample_count must be >= 1");
  if (m.tau_f1 <= 0.0) throw ConfigError("metrics.tau_f1 must be positive");
  if (m.edge_k < 2) throw ConfigError("metrics.edge_k must be >= 2");
  if (m.edge_angle_deg <= 0.0 || m.edge_angle_deg >= 180.0) {
    throw ConfigError("metrics.edge_angle_deg must lie in (0, 180)");
  }
}

std::string config_to_json_text(const Config& config) {
  json j;
  if (config.backend.transport == BackendConfig::Transport::Http) {
    j["backend"]["url"] = config.backend.url;
  } else if (config.backend.transport == BackendConfig::Transport::Subprocess) {
    j["backend"]["command"] = config.backend.command;
  }
  if (config.backend.transport != BackendConfig::Transport::None) {
    j["backend"]["timeout_seconds"] = config.backend.timeout_seconds;
  }
  j["batch_size"] = config.batch_size;
  j["segmentation"] = {{"n_prompts", config.segmentation.n_prompts},
                       {"tau_nms", config.segmentation.tau_nms},
                       {"tau_merge", config.segmentation.tau_merge},
                       {"tau_recover", config.segmentation.tau_recover}};
  j["icp"] = {{"max_iterations", config.icp.max_iterations},
              {"max_correspondence_distance", config.icp.max_correspondence_distance},
              {"convergence_tol", config.icp.convergence_tol},
              {"sample_count", config.icp.sample_count}};
  j["metrics"] = {{"sample_count", config.metrics.sample_count},
                  {"tau_f1", config.metrics.tau_f1},
                  {"edge_k", config.metrics.edge_k},
                  {"edge_angle_deg", config.metrics.edge_angle_deg}};
  j["seed"] = config.seed;
  return j.dump(2);
}

}  // namespace meshrag
