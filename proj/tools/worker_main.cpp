// meshrag-worker: reference generator/segmenter backend for tests and demos.
// Speaks the newline-delimited JSON protocol on stdin/stdout, or HTTP with
// --http PORT. Serves "generate" from a library of part meshes through the
// mock oracle, and "segment_prompt" through the built-in geometric segmenter.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "meshrag/builtin_segmenter.hpp"
#include "meshrag/errors.hpp"
#include "meshrag/io.hpp"
#include "meshrag/mock_backend.hpp"
#include "meshrag/protocol.hpp"

// httplib drags in resolv.h, whose _res macro corrupts Eigen when it comes
// first; keep it after every Eigen-bearing header.
#include <CLI11.hpp>
#include <httplib.h>

namespace {

using namespace meshrag;

// The segmenter keeps per-cloud state; requests repeat the cloud, so cache
// the last one to avoid re-preparing per prompt.
class SegmenterCache {
 public:
  std::array<MaskCandidate, 3> run(const PointCloud& cloud, int prompt_index) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!same_as_last(cloud)) {
      segmenter_.prepare(cloud);
      last_ = cloud;
    }
    return segmenter_.segment_prompt(last_, prompt_index);
  }

 private:
  bool same_as_last(const PointCloud& cloud) const {
    return cloud.size() == last_.size() && !last_.empty() &&
           cloud.positions == last_.positions && cloud.normals == last_.normals;
  }

  std::mutex mu_;
  BuiltinGeometricSegmenter segmenter_;
  PointCloud last_;
};

std::string handle_request(const std::string& line, MockOracleBackend& oracle,
                           SegmenterCache& segmenter) {
  int part_id = -1;
  try {
    const WireRequest req = decode_request(line);
    part_id = req.part_id;
    if (req.method == "generate") {
      GenerationJob job;
      job.part_id = req.part_id;
      job.prompt_cloud = req.cloud;
      job.seed = req.seed;
      const GenerationResult res = oracle.generate(job);
      return encode_generate_response(req.part_id, res.mesh);
    }
    return encode_segment_response(req.part_id,
                                   segmenter.run(req.cloud, req.prompt_index));
  } catch (const BackendError& e) {
    return encode_error_response(e.failed_id >= 0 ? e.failed_id : part_id, e.what());
  } catch (const std::exception& e) {
    return encode_error_response(part_id, e.what());
  }
}

int run_stdio(MockOracleBackend& oracle, SegmenterCache& segmenter) {
  std::mutex out_mu;
  std::vector<std::thread> in_flight;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    in_flight.emplace_back([line, &oracle, &segmenter, &out_mu] {
      const std::string reply = handle_request(line, oracle, segmenter);
      std::lock_guard<std::mutex> lock(out_mu);
      std::cout << reply << "\n" << std::flush;
    });
    // Bound the backlog so a flood of requests cannot pile up threads.
    if (in_flight.size() >= 64) {
      for (auto& t : in_flight) t.join();
      in_flight.clear();
    }
  }
  for (auto& t : in_flight) t.join();
  return 0;
}

int run_http(int port, MockOracleBackend& oracle, SegmenterCache& segmenter) {
  httplib::Server server;
  server.Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    res.set_content(handle_request(req.body, oracle, segmenter), "application/json");
  });
  server.Post("/segment_prompt",
              [&](const httplib::Request& req, httplib::Response& res) {
                res.set_content(handle_request(req.body, oracle, segmenter),
                                "application/json");
              });
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
  std::cerr << "listening on 127.0.0.1:" << port << "\n";
  if (!server.listen("127.0.0.1", port)) {
    std::cerr << "failed to bind port " << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference wire-protocol worker: oracle mesh generation from a "
               "part library plus geometric prompt segmentation"};

  std::string parts_dir;
  std::string match_by = "id";
  bool jitter = false;
  double max_rotation_deg = 5.0;
  double noise_sigma = 0.002;
  double latency_ms = 0.0;
  std::vector<int> fail_parts;
  int http_port = 0;

  app.add_option("--parts-dir", parts_dir,
                 "Directory of part meshes (*.obj), part ids 1..N in filename order");
  app.add_option("--match-by", match_by, "Part lookup: 'id' or 'geometry'")
      ->check(CLI::IsMember({"id", "geometry"}));
  app.add_flag("--jitter", jitter, "Perturb parts with a seeded rotation and noise");
  app.add_option("--max-rotation-deg", max_rotation_deg, "Jitter rotation bound");
  app.add_option("--noise-sigma", noise_sigma, "Jitter vertex noise sigma");
  app.add_option("--latency-ms", latency_ms, "Fixed artificial latency per request");
  app.add_option("--fail-part", fail_parts, "Part id that always fails (repeatable)");
  app.add_option("--http", http_port, "Serve HTTP on this port instead of stdio");

  CLI11_PARSE(app, argc, argv);

  MockOracleBackend::Options options;
  options.match = match_by == "geometry" ? MockOracleBackend::Match::ByGeometry
                                         : MockOracleBackend::Match::ById;
  options.jitter = jitter;
  options.max_rotation_deg = max_rotation_deg;
  options.noise_sigma = noise_sigma;
  options.latency_seconds = latency_ms / 1000.0;
  options.fail_parts = fail_parts;
  MockOracleBackend oracle(options);

  if (!parts_dir.empty()) {
    std::vector<std::filesystem::path> files;
    try {
      for (const auto& entry : std::filesystem::directory_iterator(parts_dir)) {
        if (entry.path().extension() == ".obj") files.push_back(entry.path());
      }
    } catch (const std::filesystem::filesystem_error& e) {
      std::cerr << "cannot read parts dir: " << e.what() << "\n";
      return 1;
    }
    std::sort(files.begin(), files.end());
    int part_id = 0;
    for (const auto& file : files) {
      try {
        oracle.add_part(++part_id, read_obj(file.string()));
      } catch (const Error& e) {
        std::cerr << "skipping " << file << ": " << e.what() << "\n";
        --part_id;
      }
    }
    if (part_id == 0) {
      std::cerr << "no readable parts in " << parts_dir << "\n";
      return 1;
    }
  }

  SegmenterCache segmenter;
  if (http_port > 0) return run_http(http_port, oracle, segmenter);
  return run_stdio(oracle, segmenter);
}
