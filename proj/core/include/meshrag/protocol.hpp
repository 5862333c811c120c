#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "meshrag/segmentation.hpp"
#include "meshrag/types.hpp"

namespace meshrag {

// Wire protocol shared by the HTTP and subprocess transports. Every message
// is one JSON object; the subprocess transport frames them one per line.
// Requests carry "part_id" (echoed back verbatim), an optional "method"
// ("generate" when absent), and method-specific fields. Error responses
// carry "part_id" and "error".

struct WireRequest {
  std::string method = "generate";  // or "segment_prompt"
  int part_id = 0;
  PointCloud cloud;
  std::uint64_t seed = 0;    // generate only
  int prompt_index = -1;     // segment_prompt only
};

std::string encode_generate_request(int part_id, const PointCloud& cloud,
                                    std::uint64_t seed);
std::string encode_segment_request(int part_id, const PointCloud& cloud,
                                   int prompt_index);
WireRequest decode_request(const std::string& text);

std::string encode_generate_response(int part_id, const TriMesh& mesh);
std::string encode_segment_response(int part_id,
                                    const std::array<MaskCandidate, 3>& masks);
std::string encode_error_response(int part_id, const std::string& message);

// Throw BackendError (with the wire part_id when present) on "error" replies
// or malformed payloads.
TriMesh decode_generate_response(const std::string& text, int expected_part_id);
std::array<MaskCandidate, 3> decode_segment_response(const std::string& text,
                                                     int expected_part_id,
                                                     std::size_t n_points,
                                                     int prompt_index);

// The wire part_id of a response line, or -1 when unparseable.
int peek_part_id(const std::string& text);

}  // namespace meshrag
