// meshrag: point-cloud segmentation, part generation via a pluggable backend,
// transformation retrieval, incremental editing, and mesh evaluation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshrag/backend_http.hpp"
#include "meshrag/backend_subprocess.hpp"
#include "meshrag/builtin_segmenter.hpp"
#include "meshrag/config.hpp"
#include "meshrag/editing.hpp"
#include "meshrag/errors.hpp"
#include "meshrag/geometry.hpp"
#include "meshrag/io.hpp"
#include "meshrag/metrics.hpp"
#include "meshrag/pipeline.hpp"
#include "meshrag/segmentation.hpp"

namespace {

using namespace meshrag;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitSegmentation = 2;
constexpr int kExitBackend = 3;
constexpr int kExitNoCorrespondences = 4;
constexpr int kExitUsage = 64;

// ---------------------------------------------------------------------------
// Configuration assembly: flag > config file > environment > default.

struct CliFlags {
  std::string config_path;
  std::string backend_url;
  std::string backend_cmd;
  double timeout_seconds = 300.0;
  int batch_size = 8;
  std::uint64_t seed = 0;
  int n_prompts = 64;
  double tau_nms = 0.5, tau_merge = 0.5, tau_recover = 0.7;
  int icp_max_iterations = 50;
  double icp_max_corr_dist = 0.1;
  double icp_tol = 1e-6;
  int icp_samples = 8192;
  int metric_samples = 8192;
  double tau_f1 = 0.02;
  int edge_k = 10;
  double edge_angle = 30.0;
};

// Registers the shared options on a subcommand and returns the flag storage.
std::shared_ptr<CliFlags> add_common_options(CLI::App* cmd) {
  auto flags = std::make_shared<CliFlags>();
  cmd->add_option("--config", flags->config_path, "JSON config file");
  cmd->add_option("--backend-url", flags->backend_url,
                  "Generator backend HTTP endpoint, e.g. http://127.0.0.1:8080");
  cmd->add_option("--backend-cmd", flags->backend_cmd,
                  "Generator backend subprocess command (split on spaces)");
  cmd->add_option("--timeout", flags->timeout_seconds, "Backend timeout in seconds");
  cmd->add_option("--batch-size", flags->batch_size, "Jobs in flight per batch");
  cmd->add_option("--seed", flags->seed, "Root seed; per-part seeds derive from it");
  cmd->add_option("--n-prompts", flags->n_prompts, "Segmentation prompt count");
  cmd->add_option("--tau-nms", flags->tau_nms, "NMS IoU threshold");
  cmd->add_option("--tau-merge", flags->tau_merge, "OBB-IoU merge threshold");
  cmd->add_option("--tau-recover", flags->tau_recover, "Mask recovery threshold");
  cmd->add_option("--icp-max-iterations", flags->icp_max_iterations, "ICP iteration cap");
  cmd->add_option("--icp-max-corr-dist", flags->icp_max_corr_dist,
                  "ICP correspondence gate, fraction of target AABB diagonal");
  cmd->add_option("--icp-tol", flags->icp_tol, "ICP relative RMSE convergence tolerance");
  cmd->add_option("--icp-samples", flags->icp_samples, "ICP source sample count");
  cmd->add_option("--metric-samples", flags->metric_samples, "Metric sample count");
  cmd->add_option("--tau-f1", flags->tau_f1, "F-score distance threshold");
  cmd->add_option("--edge-k", flags->edge_k, "Edge extraction neighborhood size");
  cmd->add_option("--edge-angle", flags->edge_angle, "Edge extraction angle threshold");
  return flags;
}

std::vector<std::string> split_command(const std::string& text) {
  std::vector<std::string> out;
  std::string word;
  for (char c : text) {
    if (c == ' ') {
      if (!word.empty()) out.push_back(std::move(word));
      word = {};
    } else {
      word.push_back(c);
    }
  }
  if (!word.empty()) out.push_back(std::move(word));
  return out;
}

Config resolve_config(const CLI::App* cmd, const CliFlags& flags) {
  Config config;
  if (!flags.config_path.empty()) config = load_config(flags.config_path);

  const auto passed = [&](const std::string& name) {
    return cmd->count(name) > 0;
  };
  if (passed("--backend-url")) {
    config.backend.transport = BackendConfig::Transport::Http;
    config.backend.url = flags.backend_url;
    config.backend.command.clear();
  } else if (passed("--backend-cmd")) {
    config.backend.transport = BackendConfig::Transport::Subprocess;
    config.backend.command = split_command(flags.backend_cmd);
    config.backend.url.clear();
  }
  if (passed("--timeout")) config.backend.timeout_seconds = flags.timeout_seconds;
  if (passed("--batch-size")) config.batch_size = flags.batch_size;
  if (passed("--seed")) config.seed = flags.seed;
  if (passed("--n-prompts")) config.segmentation.n_prompts = flags.n_prompts;
  if (passed("--tau-nms")) config.segmentation.tau_nms = flags.tau_nms;
  if (passed("--tau-merge")) config.segmentation.tau_merge = flags.tau_merge;
  if (passed("--tau-recover")) config.segmentation.tau_recover = flags.tau_recover;
  if (passed("--icp-max-iterations")) config.icp.max_iterations = flags.icp_max_iterations;
  if (passed("--icp-max-corr-dist")) {
    config.icp.max_correspondence_distance = flags.icp_max_corr_dist;
  }
  if (passed("--icp-tol")) config.icp.convergence_tol = flags.icp_tol;
  if (passed("--icp-samples")) config.icp.sample_count = flags.icp_samples;
  if (passed("--metric-samples")) config.metrics.sample_count = flags.metric_samples;
  if (passed("--tau-f1")) config.metrics.tau_f1 = flags.tau_f1;
  if (passed("--edge-k")) config.metrics.edge_k = flags.edge_k;
  if (passed("--edge-angle")) config.metrics.edge_angle_deg = flags.edge_angle;

  apply_env_fallback(config);
  config.segmentation.seed = config.seed;
  config.metrics.seed = config.seed;
  validate(config);
  return config;
}

// Owns whichever transport the config selects; a subprocess serves both the
// generator and the segmenter roles over one worker.
struct BackendBundle {
  std::unique_ptr<HttpGeneratorBackend> http_generator;
  std::unique_ptr<HttpSegmenterBackend> http_segmenter;
  std::unique_ptr<SubprocessBackend> subprocess;
  GeneratorBackend* generator = nullptr;
  SegmenterBackend* segmenter = nullptr;
};

BackendBundle make_backends(const Config& config) {
  BackendBundle bundle;
  switch (config.backend.transport) {
    case BackendConfig::Transport::Http:
      bundle.http_generator = std::make_unique<HttpGeneratorBackend>(
          config.backend.url, config.backend.timeout_seconds);
      bundle.http_segmenter = std::make_unique<HttpSegmenterBackend>(
          config.backend.url, config.backend.timeout_seconds);
      bundle.generator = bundle.http_generator.get();
      bundle.segmenter = bundle.http_segmenter.get();
      break;
    case BackendConfig::Transport::Subprocess:
      bundle.subprocess = std::make_unique<SubprocessBackend>(
          config.backend.command, config.backend.timeout_seconds);
      bundle.generator = bundle.subprocess.get();
      bundle.segmenter = bundle.subprocess.get();
      break;
    case BackendConfig::Transport::None:
      break;
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Small output helpers.

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

Vec3 part_color(int part_id) {
  // Golden-ratio hue stepping keeps adjacent part ids visually distinct.
  const double hue = std::fmod(0.618033988749895 * part_id, 1.0) * 6.0;
  const int sector = static_cast<int>(hue);
  const double f = hue - sector;
  const double v = 0.95, s = 0.65;
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (sector % 6) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

void write_labeled_ply(const std::string& path, const PointCloud& cloud,
                       const SegmentLabels& labels) {
  PlyCloud data;
  data.cloud = cloud;
  PlyExtraProperty part{"part_id", "int", {}};
  PlyExtraProperty r{"red", "uchar", {}}, g{"green", "uchar", {}},
      b{"blue", "uchar", {}};
  for (int label : labels.labels) {
    part.values.push_back(label);
    const Vec3 c = part_color(label);
    r.values.push_back(std::round(255.0 * c.x()));
    g.values.push_back(std::round(255.0 * c.y()));
    b.values.push_back(std::round(255.0 * c.z()));
  }
  data.extras = {part, r, g, b};
  write_ply(path, data);
}

void print_stage_table(const PipelineReport& report) {
  std::printf("%-16s %10s\n", "Stage", "Time (s)");
  std::printf("%-16s %10.3f\n", "PC Seg.", report.seg_seconds);
  std::printf("%-16s %10.3f\n", "Mesh Gen.", report.gen_seconds);
  std::printf("%-16s %10.3f\n", "Coarse Align.", report.coarse_seconds);
  std::printf("%-16s %10.3f\n", "ICP Refine.", report.icp_seconds);
  std::printf("%-16s %10.3f\n", "Assembly", report.assembly_seconds);
  std::printf("%-16s %10.3f\n", "Total", report.total_seconds);
}

// Maps library errors to the documented exit codes. Segmentation-context
// errors are classified by the caller instead.
int exit_code_for(const Error& e) {
  if (dynamic_cast<const NoCorrespondencesError*>(&e)) return kExitNoCorrespondences;
  if (dynamic_cast<const BackendError*>(&e)) return kExitBackend;
  if (dynamic_cast<const PipelineEmptyError*>(&e)) return kExitBackend;
  if (dynamic_cast<const EmptySegmentationError*>(&e)) return kExitSegmentation;
  return kExitIo;
}

SegmentationResult run_segmentation(const PointCloud& cloud, const Config& config,
                                    SegmenterBackend* wire_segmenter,
                                    bool use_wire) {
  if (!cloud.has_normals()) {
    throw NoNormalsError("normals required: segmentation needs per-point normals");
  }
  if (use_wire && wire_segmenter != nullptr) {
    return segment_auto(cloud, *wire_segmenter, config.segmentation);
  }
  BuiltinGeometricSegmenter builtin;
  return segment_auto(cloud, builtin, config.segmentation);
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_segment(const CLI::App* cmd, const CliFlags& flags,
                const std::string& input_path, const std::string& labels_path,
                const std::string& parts_ply_path, bool use_wire_segmenter) {
  const Config config = resolve_config(cmd, flags);

  PointCloud cloud;
  try {
    cloud = read_ply(input_path).cloud;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    BackendBundle backends = make_backends(config);
    const SegmentationResult result =
        run_segmentation(cloud, config, backends.segmenter, use_wire_segmenter);
    write_text(labels_path, labels_to_json(result.labels));
    std::string ply_path = parts_ply_path;
    if (ply_path.empty()) {
      ply_path = std::filesystem::path(labels_path).replace_extension(".ply").string();
    }
    write_labeled_ply(ply_path, cloud, result.labels);
    std::printf("%d parts\n", result.labels.n_parts);
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Anything failing past I/O in this command is a segmentation failure.
    return kExitSegmentation;
  }
}

int cmd_generate(const CLI::App* cmd, const CliFlags& flags,
                 const std::string& input_path, const std::string& output_path,
                 const std::string& labels_path, bool auto_segment,
                 bool use_wire_segmenter, const std::string& report_path) {
  const Config config = resolve_config(cmd, flags);

  PointCloud cloud;
  SegmentLabels labels;
  try {
    cloud = read_ply(input_path).cloud;
    if (!labels_path.empty()) {
      std::ifstream in(labels_path);
      if (!in) throw IoError("cannot open " + labels_path);
      std::ostringstream text;
      text << in.rdbuf();
      labels = labels_from_json(text.str());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    BackendBundle backends = make_backends(config);
    if (backends.generator == nullptr) {
      throw ConfigError("no generator backend configured: pass --backend-url, "
                        "--backend-cmd, a config file, or MESHRAG_BACKEND_URL");
    }

    double seg_seconds = 0.0;
    if (auto_segment) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        labels = run_segmentation(cloud, config, backends.segmenter,
                                  use_wire_segmenter)
                     .labels;
      } catch (const EmptySegmentationError&) {
        labels.labels.assign(cloud.size(), 1);
        labels.n_parts = 1;
      }
      seg_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    }

    PipelineOptions opts;
    opts.batch_size = config.batch_size;
    opts.icp = config.icp;
    opts.root_seed = config.seed;
    auto [mesh, report] =
        generate_parallel(cloud, labels, *backends.generator, opts, seg_seconds);

    write_obj(output_path, mesh);
    if (!report_path.empty()) write_text(report_path, report.to_json());
    print_stage_table(report);
    if (report.parts_failed > 0) {
      std::printf("%d of %d parts failed; see report\n", report.parts_failed,
                  report.parts_total);
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_edit(const CLI::App* cmd, const CliFlags& flags,
             const std::string& initial_path, const std::string& edited_path,
             const std::string& output_path, bool use_wire_segmenter,
             const std::string& report_path) {
  const Config config = resolve_config(cmd, flags);

  EditRequest request;
  try {
    request.initial_mesh = read_obj(initial_path);
    request.edited_cloud = read_ply(edited_path).cloud;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  request.icp = config.icp;
  request.segmentation = config.segmentation;

  try {
    BackendBundle backends = make_backends(config);
    if (backends.generator == nullptr) {
      throw ConfigError("no generator backend configured: pass --backend-url, "
                        "--backend-cmd, a config file, or MESHRAG_BACKEND_URL");
    }
    BuiltinGeometricSegmenter builtin;
    SegmenterBackend* segmenter =
        (use_wire_segmenter && backends.segmenter != nullptr)
            ? backends.segmenter
            : static_cast<SegmenterBackend*>(&builtin);

    PipelineOptions opts;
    opts.batch_size = config.batch_size;
    opts.icp = config.icp;
    opts.root_seed = config.seed;
    auto [mesh, report] = edit_incremental(request, *backends.generator,
                                           *segmenter, opts);

    write_obj(output_path, mesh);
    if (!report_path.empty()) write_text(report_path, report.to_json());
    if (report.no_change) {
      std::printf("no changes: edited cloud matches the initial mesh\n");
    } else {
      std::printf("%d new parts from %zu residual points\n",
                  report.generated_parts, report.residual_points);
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_eval(const CLI::App* cmd, const CliFlags& flags,
             const std::string& pred_path, const std::string& gt_path,
             const std::string& pred_dir, const std::string& gt_dir,
             const std::string& csv_path, const std::string& json_path) {
  const Config config = resolve_config(cmd, flags);

  std::vector<std::pair<std::string, std::string>> pairs;  // (pred, gt)
  if (!pred_dir.empty() || !gt_dir.empty()) {
    if (pred_dir.empty() || gt_dir.empty()) {
      std::cerr << "error: --pred-dir and --gt-dir go together\n";
      return kExitUsage;
    }
    std::map<std::string, std::string> gt_by_name;
    try {
      for (const auto& entry : std::filesystem::directory_iterator(gt_dir)) {
        if (entry.path().extension() == ".obj") {
          gt_by_name[entry.path().filename().string()] = entry.path().string();
        }
      }
      for (const auto& entry : std::filesystem::directory_iterator(pred_dir)) {
        if (entry.path().extension() != ".obj") continue;
        const auto it = gt_by_name.find(entry.path().filename().string());
        if (it != gt_by_name.end()) pairs.emplace_back(entry.path().string(), it->second);
      }
    } catch (const std::filesystem::filesystem_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    }
    std::sort(pairs.begin(), pairs.end());
  } else {
    if (pred_path.empty() || gt_path.empty()) {
      std::cerr << "error: need pred and gt meshes, or --pred-dir/--gt-dir\n";
      return kExitUsage;
    }
    pairs.emplace_back(pred_path, gt_path);
  }

  std::string csv = metrics_csv_header() + "\n";
  std::string json_rows = "[";
  bool any_failed = false;
  int done = 0;
  double sums[8] = {};
  for (const auto& [pred_file, gt_file] : pairs) {
    try {
      const TriMesh pred = read_obj(pred_file);
      const TriMesh gt = read_obj(gt_file);
      const auto t0 = std::chrono::steady_clock::now();
      const MetricsReport report = evaluate_all(pred, gt, config.metrics);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      const std::string name =
          std::filesystem::path(pred_file).filename().string();
      csv += to_csv_row(name, report, wall) + "\n";
      if (done > 0) json_rows += ",";
      json_rows += "{\"name\":\"" + name + "\",\"metrics\":" +
                   to_json_string(report) + "}";
      sums[0] += report.cd_l1;
      sums[1] += report.cd_l2;
      sums[2] += report.hd;
      sums[3] += report.nc;
      sums[4] += report.f1;
      sums[5] += report.ecd;
      sums[6] += report.ef1;
      sums[7] += wall;
      ++done;
    } catch (const Error& e) {
      std::cerr << "error on (" << pred_file << ", " << gt_file << "): " << e.what()
                << "\n";
      any_failed = true;
    }
  }
  json_rows += "]";

  if (done > 0) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "mean,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.6g\n",
                  sums[0] / done, sums[1] / done, sums[2] / done, sums[3] / done,
                  sums[4] / done, sums[5] / done, sums[6] / done, sums[7] / done);
    csv += buf;
  }

  std::fputs(csv.c_str(), stdout);
  try {
    if (!csv_path.empty()) write_text(csv_path, csv);
    if (!json_path.empty()) write_text(json_path, json_rows);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return any_failed ? kExitIo : kExitOk;
}

int cmd_pipeline(const CLI::App* cmd, const CliFlags& flags,
                 const std::string& input_path, const std::string& output_path,
                 bool use_wire_segmenter, const std::string& report_path,
                 const std::string& gt_path) {
  const int code = cmd_generate(cmd, flags, input_path, output_path, "", true,
                                use_wire_segmenter, report_path);
  if (code != kExitOk || gt_path.empty()) return code;
  return cmd_eval(cmd, flags, output_path, gt_path, "", "", "", "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment point clouds, generate and place mesh parts through a "
               "pluggable backend, edit incrementally, and evaluate fidelity"};
  app.require_subcommand(1);

  // segment
  auto* segment = app.add_subcommand("segment", "Segment a point cloud into parts");
  std::string seg_input, seg_labels, seg_parts_ply;
  bool seg_wire = false;
  segment->add_option("input", seg_input, "Input point cloud (.ply)")->required();
  segment->add_option("labels", seg_labels, "Output labels JSON path")->required();
  segment->add_option("--parts-ply", seg_parts_ply,
                      "Part-colored PLY path (default: labels path with .ply)");
  segment->add_flag("--wire-segmenter", seg_wire,
                    "Use the configured backend's segment_prompt method");
  auto seg_flags = add_common_options(segment);

  // generate
  auto* generate = app.add_subcommand(
      "generate", "Generate parts for a segmented cloud and assemble a mesh");
  std::string gen_input, gen_output, gen_labels, gen_report;
  bool gen_auto = false, gen_wire = false;
  generate->add_option("input", gen_input, "Input point cloud (.ply)")->required();
  generate->add_option("output", gen_output, "Assembled mesh path (.obj)")->required();
  generate->add_option("--labels", gen_labels, "Labels JSON from 'segment'");
  generate->add_flag("--auto-segment", gen_auto, "Segment the cloud first");
  generate->add_flag("--wire-segmenter", gen_wire,
                     "With --auto-segment, segment through the backend");
  generate->add_option("--report", gen_report, "Pipeline report JSON path");
  auto gen_flags = add_common_options(generate);

  // edit
  auto* edit = app.add_subcommand("edit", "Apply an incremental edit to a mesh");
  std::string edit_initial, edit_cloud, edit_output, edit_report;
  bool edit_wire = false;
  edit->add_option("initial", edit_initial, "Initial mesh (.obj)")->required();
  edit->add_option("edited", edit_cloud, "Edited point cloud (.ply)")->required();
  edit->add_option("output", edit_output, "Edited mesh path (.obj)")->required();
  edit->add_flag("--wire-segmenter", edit_wire,
                 "Segment the residual through the backend");
  edit->add_option("--report", edit_report, "Edit report JSON path");
  auto edit_flags = add_common_options(edit);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate meshes against ground truth");
  std::string eval_pred, eval_gt, eval_pred_dir, eval_gt_dir, eval_csv, eval_json;
  eval->add_option("pred", eval_pred, "Predicted mesh (.obj)");
  eval->add_option("gt", eval_gt, "Ground-truth mesh (.obj)");
  eval->add_option("--pred-dir", eval_pred_dir, "Directory of predicted meshes");
  eval->add_option("--gt-dir", eval_gt_dir, "Directory of ground-truth meshes");
  eval->add_option("--csv", eval_csv, "CSV output path");
  eval->add_option("--json", eval_json, "JSON output path");
  auto eval_flags = add_common_options(eval);

  // pipeline
  auto* pipeline = app.add_subcommand(
      "pipeline", "Auto-segment, generate, assemble, and optionally evaluate");
  std::string pipe_input, pipe_output, pipe_report, pipe_gt;
  bool pipe_wire = false;
  pipeline->add_option("input", pipe_input, "Input point cloud (.ply)")->required();
  pipeline->add_option("output", pipe_output, "Assembled mesh path (.obj)")->required();
  pipeline->add_flag("--wire-segmenter", pipe_wire,
                     "Segment through the backend");
  pipeline->add_option("--report", pipe_report, "Pipeline report JSON path");
  pipeline->add_option("--gt", pipe_gt, "Ground-truth mesh to evaluate against");
  auto pipe_flags = add_common_options(pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (segment->parsed()) {
      return cmd_segment(segment, *seg_flags, seg_input, seg_labels, seg_parts_ply,
                         seg_wire);
    }
    if (generate->parsed()) {
      return cmd_generate(generate, *gen_flags, gen_input, gen_output, gen_labels,
                          gen_auto, gen_wire, gen_report);
    }
    if (edit->parsed()) {
      return cmd_edit(edit, *edit_flags, edit_initial, edit_cloud, edit_output,
                      edit_wire, edit_report);
    }
    if (eval->parsed()) {
      return cmd_eval(eval, *eval_flags, eval_pred, eval_gt, eval_pred_dir,
                      eval_gt_dir, eval_csv, eval_json);
    }
    if (pipeline->parsed()) {
      return cmd_pipeline(pipeline, *pipe_flags, pipe_input, pipe_output, pipe_wire,
                          pipe_report, pipe_gt);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}
