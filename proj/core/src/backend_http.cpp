#include "meshrag/backend_http.hpp"

#include <chrono>
#include <cmath>

#include <httplib.h>

#include "meshrag/errors.hpp"
#include "meshrag/protocol.hpp"

namespace meshrag {

namespace {

// POSTs `body` to url + path and returns the response body. Connection-level
// failures surface as "backend unreachable"; non-200 statuses as failures.
std::string post_json(const std::string& url, const std::string& path,
                      const std::string& body, double timeout_seconds,
                      int part_id) {
  httplib::Client client(url);
  const auto whole = std::chrono::duration<double>(timeout_seconds);
  client.set_connection_timeout(whole);
  client.set_read_timeout(whole);
  client.set_write_timeout(whole);

  const httplib::Result res = client.Post(path, body, "application/json");
  if (!res) {
    throw BackendError("backend unreachable at " + url + ": " +
                           httplib::to_string(res.error()),
                       part_id);
  }
  if (res->status != 200) {
    throw BackendError("backend returned HTTP " + std::to_string(res->status) +
                           " for " + path + ": " + res->body,
                       part_id);
  }
  return res->body;
}

}  // namespace

HttpGeneratorBackend::HttpGeneratorBackend(std::string url, double timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {}

GenerationResult HttpGeneratorBackend::generate(const GenerationJob& job) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string body =
      encode_generate_request(job.part_id, job.prompt_cloud, job.seed);
  const std::string reply =
      post_json(url_, "/generate", body, timeout_seconds_, job.part_id);

  GenerationResult out;
  out.part_id = job.part_id;
  out.mesh = decode_generate_response(reply, job.part_id);
  out.backend_latency =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

HttpSegmenterBackend::HttpSegmenterBackend(std::string url, double timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {}

std::array<MaskCandidate, 3> HttpSegmenterBackend::segment_prompt(
    const PointCloud& cloud, int prompt_index) {
  const std::string body = encode_segment_request(prompt_index, cloud, prompt_index);
  const std::string reply =
      post_json(url_, "/segment_prompt", body, timeout_seconds_, prompt_index);
  return decode_segment_response(reply, prompt_index, cloud.size(), prompt_index);
}

}  // namespace meshrag
