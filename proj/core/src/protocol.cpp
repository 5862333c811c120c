#include "meshrag/protocol.hpp"

#include <json.hpp>

#include "meshrag/errors.hpp"

namespace meshrag {

namespace {

using nlohmann::json;

json cloud_to_json(const PointCloud& cloud) {
  json points = json::array();
  for (const Vec3& p : cloud.positions) points.push_back({p.x(), p.y(), p.z()});
  json body;
  body["points"] = std::move(points);
  if (cloud.has_normals()) {
    json normals = json::array();
    for (const Vec3& n : cloud.normals) normals.push_back({n.x(), n.y(), n.z()});
    body["normals"] = std::move(normals);
  }
  return body;
}

PointCloud cloud_from_json(const json& body) {
  PointCloud cloud;
  for (const auto& p : body.at("points")) {
    cloud.positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                                 p.at(2).get<double>());
  }
  if (body.contains("normals")) {
    for (const auto& n : body.at("normals")) {
      cloud.normals.emplace_back(n.at(0).get<double>(), n.at(1).get<double>(),
                                 n.at(2).get<double>());
    }
  }
  return cloud;
}

[[noreturn]] void bad_payload(int part_id, const std::string& detail) {
  throw BackendError("malformed wire payload: " + detail, part_id);
}

}  // namespace

std::string encode_generate_request(int part_id, const PointCloud& cloud,
                                    std::uint64_t seed) {
  json j = cloud_to_json(cloud);
  j["part_id"] = part_id;
  j["seed"] = seed;
  return j.dump();
}

std::string encode_segment_request(int part_id, const PointCloud& cloud,
                                   int prompt_index) {
  json j = cloud_to_json(cloud);
  j["method"] = "segment_prompt";
  j["part_id"] = part_id;
  j["prompt_index"] = prompt_index;
  return j.dump();
}

WireRequest decode_request(const std::string& text) {
  try {
    const json j = json::parse(text);
    WireRequest req;
    req.method = j.value("method", "generate");
    req.part_id = j.at("part_id").get<int>();
    req.cloud = cloud_from_json(j);
    if (req.method == "generate") {
      req.seed = j.value("seed", std::uint64_t{0});
    } else if (req.method == "segment_prompt") {
      req.prompt_index = j.at("prompt_index").get<int>();
    } else {
      throw BackendError("unknown wire method: " + req.method, req.part_id);
    }
    return req;
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed wire request: ") + e.what());
  }
}

std::string encode_generate_response(int part_id, const TriMesh& mesh) {
  json vertices = json::array();
  for (const Vec3& v : mesh.vertices) vertices.push_back({v.x(), v.y(), v.z()});
  json faces = json::array();
  for (const auto& [i, j, k] : mesh.faces) faces.push_back({i, j, k});
  json out;
  out["part_id"] = part_id;
  out["vertices"] = std::move(vertices);
  out["faces"] = std::move(faces);
  return out.dump();
}

std::string encode_segment_response(int part_id,
                                    const std::array<MaskCandidate, 3>& masks) {
  json mask_lists = json::array();
  json scores = json::array();
  for (const MaskCandidate& m : masks) {
    json indices = json::array();
    for (std::size_t i = 0; i < m.mask.size(); ++i) {
      if (m.mask[i]) indices.push_back(i);
    }
    mask_lists.push_back(std::move(indices));
    scores.push_back(m.score);
  }
  json out;
  out["part_id"] = part_id;
  out["masks"] = std::move(mask_lists);
  out["scores"] = std::move(scores);
  return out.dump();
}

std::string encode_error_response(int part_id, const std::string& message) {
  json out;
  out["part_id"] = part_id;
  out["error"] = message;
  return out.dump();
}

TriMesh decode_generate_response(const std::string& text, int expected_part_id) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad_payload(expected_part_id, e.what());
  }
  if (j.contains("error")) {
    throw BackendError(j["error"].get<std::string>(), expected_part_id);
  }
  try {
    if (j.at("part_id").get<int>() != expected_part_id) {
      bad_payload(expected_part_id, "part_id mismatch");
    }
    TriMesh mesh;
    for (const auto& v : j.at("vertices")) {
      mesh.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>(),
                                 v.at(2).get<double>());
    }
    for (const auto& f : j.at("faces")) {
      mesh.faces.push_back(
          {f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    }
    mesh.validate();
    return mesh;
  } catch (const json::exception& e) {
    bad_payload(expected_part_id, e.what());
  } catch (const Error& e) {
    throw BackendError(std::string("invalid mesh from backend: ") + e.what(),
                       expected_part_id);
  }
}

std::array<MaskCandidate, 3> decode_segment_response(const std::string& text,
                                                     int expected_part_id,
                                                     std::size_t n_points,
                                                     int prompt_index) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad_payload(expected_part_id, e.what());
  }
  if (j.contains("error")) {
    throw BackendError(j["error"].get<std::string>(), expected_part_id);
  }
  try {
    if (j.at("part_id").get<int>() != expected_part_id) {
      bad_payload(expected_part_id, "part_id mismatch");
    }
    const auto& mask_lists = j.at("masks");
    const auto& scores = j.at("scores");
    if (mask_lists.size() != 3 || scores.size() != 3) {
      bad_payload(expected_part_id, "expected exactly 3 masks and scores");
    }
    std::array<MaskCandidate, 3> out;
    for (int m = 0; m < 3; ++m) {
      out[m].mask.assign(n_points, 0);
      for (const auto& idx : mask_lists.at(m)) {
        const auto i = idx.get<long>();
        if (i < 0 || i >= static_cast<long>(n_points)) {
          bad_payload(expected_part_id, "mask index out of range");
        }
        out[m].mask[static_cast<std::size_t>(i)] = 1;
      }
      out[m].score = scores.at(m).get<double>();
      out[m].prompt_index = prompt_index;
    }
    return out;
  } catch (const json::exception& e) {
    bad_payload(expected_part_id, e.what());
  }
}

int peek_part_id(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.contains("part_id") && j["part_id"].is_number()) {
      return j["part_id"].get<int>();
    }
  } catch (const json::exception&) {
  }
  return -1;
}

}  // namespace meshrag
