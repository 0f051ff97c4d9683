// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "strokenet/errors.hpp"
#include "strokenet/pipeline.hpp"

namespace strokenet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::optional<std::string> profile;
  int threads = 0;  // 0 keeps the OpenMP default
  std::string out;  // result file; empty means stdout
};

void emit(const json& j, const Common& common, std::ostream& out) {
  if (common.out.empty()) {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(common.out);
  if (!f) throw InputError("cannot write " + common.out);
  f << j.dump(2) << "\n";
}

bool is_manifest(const fs::path& path) {
  if (fs::is_directory(path)) return fs::exists(path / "manifest.json");
  return fs::is_regular_file(path);
}

// A clip directory or every video of a manifest; annotations are optional.
std::vector<LoadedVideo> load_inputs(const fs::path& path, const RunConfig& cfg, std::ostream& err) {
  std::vector<LoadedVideo> videos;
  if (is_manifest(path)) {
    const auto m = load_manifest(path);
    if (m.videos.empty()) throw InputError("manifest " + path.string() + " lists no videos");
    for (const auto& e : m.videos) videos.push_back(load_video(e, cfg, false));
  } else {
    videos.push_back(load_video_dir(path, cfg));
  }
  for (const auto& v : videos)
    for (const auto& w : v.warnings) err << "warning: " << w << "\n";
  return videos;
}

// Ground truth from a dataset manifest, annotation files or segment files.
std::vector<SegmentFile> load_ground_truth(fs::path path) {
  if (fs::is_directory(path)) path /= "manifest.json";
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!(j.is_object() && j.contains("videos"))) return load_segment_files(path);
  std::vector<SegmentFile> out;
  for (const auto& e : load_manifest(path).videos) {
    auto files = load_segment_files(e.annotations);
    for (auto& f : files) {
      if (f.video.empty()) f.video = e.name;
      out.push_back(std::move(f));
    }
  }
  return out;
}

struct ModelArgs {
  std::string config;
  std::string checkpoint;
  std::string input;
  std::optional<std::string> decision;
  std::optional<std::size_t> stride;
  std::optional<double> sigma;
};

void add_model_args(CLI::App* cmd, ModelArgs& a) {
  cmd->add_option("--config", a.config, "run config JSON")->required();
  cmd->add_option("--checkpoint", a.checkpoint, "trained checkpoint")->required();
  cmd->add_option("--input", a.input, "clip directory or dataset manifest")->required();
  cmd->add_option("--decision", a.decision, "no_window, gaussian, mean, vote or vote_sliding");
  cmd->add_option("--stride", a.stride, "sliding-window stride in frames");
  cmd->add_option("--sigma", a.sigma, "GAUSSIAN width in frames (0 means window/4)");
}

std::pair<RunConfig, TwoStreamNet<float>> load_model(const ModelArgs& a, const Common& common) {
  auto cfg = load_run_config(a.config, common.profile);
  try {
    if (a.decision) cfg.decision.kind = parse_decision_kind(*a.decision);
    if (a.stride) cfg.decision.stride = *a.stride;
    if (a.sigma) cfg.decision.sigma = *a.sigma;
    cfg.decision.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (!fs::exists(a.checkpoint)) throw InputError("checkpoint " + a.checkpoint + " not found");
  auto net = load_checkpoint(a.checkpoint, &cfg.model);
  return {std::move(cfg), std::move(net)};
}

int cmd_synth(const std::string& spec_file, const std::string& preset, std::optional<std::uint64_t> seed,
              const std::string& out_dir, std::ostream& out) {
  SyntheticSpec spec;
  if (!spec_file.empty()) {
    spec = load_synthetic_spec(spec_file);
  } else if (preset == "classification") {
    spec = SyntheticSpec::classification();
  } else if (preset == "detection") {
    spec = SyntheticSpec::detection();
  } else {
    throw InputError("unknown preset '" + preset + "' (expected classification or detection)");
  }
  if (seed) spec.seed = *seed;
  const auto m = write_synthetic_dataset(spec, out_dir);
  out << "wrote " << m.videos.size() << " videos, " << m.files.size() << " files to " << out_dir << "\n";
  return kOk;
}

int cmd_render(const std::string& frames_path, const std::string& poses_path, const std::string& mode,
               const std::string& out_dir, std::ostream& out, std::ostream& err) {
  RenderMode render;
  if (mode == "black") {
    render = RenderMode::black;
  } else if (mode == "overlay") {
    render = RenderMode::overlay;
  } else {
    throw InputError("unknown render mode '" + mode + "' (expected black or overlay)");
  }
  if (!fs::exists(frames_path)) throw InputError("frames " + frames_path + " not found");
  if (!fs::exists(poses_path)) throw InputError("keypoint stream " + poses_path + " not found");
  const auto frames = load_frame_sequence(frames_path);
  auto poses = parse_keypoint_stream(fs::path(poses_path));
  std::size_t n = frames.frame_count();
  // A stream with no records means no detections at all, not zero frames.
  if (!poses.empty() && poses.size() != n) {
    err << "warning: " << frames.frame_count() << " frames but " << poses.size()
        << " keypoint frames; rendering the first " << std::min(n, poses.size()) << "\n";
    n = std::min(n, poses.size());
  }
  poses.resize(n);
  const std::pair<int, int> size{frames.width(), frames.height()};
  const auto spec = SkeletonSpec::coco();
  FrameSequence rendered;
  for (std::size_t f = 0; f < n; ++f)
    rendered.frames.push_back(compose_frame(render, &frames.frames[f], poses[f], spec, size));
  save_frame_directory(out_dir, rendered);
  out << "rendered " << n << " frames to " << out_dir << "\n";
  return kOk;
}

int cmd_train(const std::string& config, const std::optional<std::string>& output_dir, const Common& common,
              std::ostream& out) {
  auto cfg = load_run_config(config, common.profile);
  if (output_dir) cfg.output_dir = *output_dir;
  const auto result = run_training(cfg, &out);
  json summary = {{"epochs_run", result.history.size()},
                  {"best_epoch", result.best_epoch},
                  {"best_accuracy", result.best_accuracy},
                  {"final", result.history.empty() ? json(nullptr) : to_json(result.history.back())},
                  {"checkpoints", {(cfg.output_dir / "final.ckpt").generic_string(),
                                   (cfg.output_dir / "best.ckpt").generic_string()}}};
  if (cfg.profile == "paper") summary["reference"] = reference_results();
  std::ofstream(cfg.output_dir / "summary.json") << summary.dump(2) << "\n";
  return kOk;
}

int cmd_classify(const ModelArgs& a, const Common& common, std::ostream& out, std::ostream& err) {
  const auto [cfg, net] = load_model(a, common);
  const auto videos = load_inputs(a.input, cfg, err);
  json results = json::array();
  for (const auto& v : videos) results.push_back(to_json(classify_clip(net, v, cfg.decision, cfg.batch_size)));
  emit(is_manifest(a.input) ? results : results[0], common, out);
  return kOk;
}

int cmd_detect(const ModelArgs& a, std::optional<double> threshold, std::optional<std::size_t> min_length,
               const Common& common, std::ostream& out, std::ostream& err) {
  auto [cfg, net] = load_model(a, common);
  if (threshold) cfg.threshold = *threshold;
  if (min_length) cfg.min_length = *min_length;
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw InputError("threshold must lie in (0, 1)");
  if (cfg.min_length == 0) throw InputError("min_length must be >= 1");
  if (net.config().num_classes != 2) throw ConfigMismatch("num_classes", "detection needs a 2-class checkpoint");
  const auto videos = load_inputs(a.input, cfg, err);
  json results = json::array();
  for (const auto& v : videos) {
    const auto r = detect_video(net, v, cfg.decision, cfg.threshold, cfg.min_length, cfg.batch_size);
    if (r.too_short) {
      err << "warning: video " << v.name << " has " << v.frames.frame_count() << " frames, fewer than the "
          << cfg.model.frames << "-frame window; no segments\n";
    }
    results.push_back(r.segments);
  }
  emit(is_manifest(a.input) ? results : results[0], common, out);
  return kOk;
}

int cmd_evaluate(const std::string& task_name, const std::string& pred, const std::string& gt, bool per_class,
                 const Common& common, std::ostream& out) {
  Task task;
  try {
    task = parse_task(task_name);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto truth = load_ground_truth(gt);
  json report;
  if (task == Task::detect) {
    const auto paired = pair_videos(load_segment_files(pred), truth);
    report = detection_report(paired, per_class);
  } else {
    std::ifstream in(pred);
    if (!in) throw InputError("cannot open " + pred);
    std::vector<SegmentFile> labels;
    try {
      auto j = json::parse(in);
      if (!j.is_array()) j = json::array({j});
      // Each clip label becomes a one-frame segment so pairing is shared.
      for (const auto& r : j) labels.push_back({r.at("video").get<std::string>(), {{0, 1, r.at("label").get<std::size_t>()}}});
    } catch (const json::exception& e) {
      throw InputError(pred + ": " + e.what());
    }
    std::vector<std::size_t> predicted, expected;
    for (const auto& p : pair_videos(labels, truth)) {
      if (p.ground_truth.size() != 1)
        throw InputError("clip " + p.video + " has " + std::to_string(p.ground_truth.size()) + " strokes, expected 1");
      predicted.push_back(p.predictions[0].label);
      expected.push_back(p.ground_truth[0].label);
    }
    report = classification_report(classification_metrics(predicted, expected), predicted.size());
  }
  if (common.profile && *common.profile == "paper") report["reference"] = reference_results();
  emit(report, common, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stream 3D CNN for stroke classification and detection", "strokenet"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--profile", common.profile, "size preset: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--threads", common.threads, "kernel threads; 1 gives bitwise-reproducible runs")
      ->check(CLI::NonNegativeNumber);

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  std::string spec_file, preset = "classification", synth_out;
  std::optional<std::uint64_t> seed;
  synth->add_option("--spec", spec_file, "synthetic spec JSON (overrides --preset)");
  synth->add_option("--preset", preset, "classification or detection");
  synth->add_option("--seed", seed, "override the spec seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* render = app.add_subcommand("render", "draw skeletons on black or over the frames");
  std::string frames_path, poses_path, mode = "black", render_out;
  render->add_option("--frames", frames_path, "frame directory or TTEN file")->required();
  render->add_option("--poses", poses_path, "keypoint stream (JSON lines)")->required();
  render->add_option("--mode", mode, "black or overlay");
  render->add_option("--out", render_out, "output frame directory")->required();

  auto* train = app.add_subcommand("train", "train a model from a run config");
  std::string train_config;
  std::optional<std::string> train_out;
  train->add_option("--config", train_config, "run config JSON")->required();
  train->add_option("--out", train_out, "output directory (overrides output_dir)");

  auto* classify = app.add_subcommand("classify", "label whole clips");
  ModelArgs classify_args;
  add_model_args(classify, classify_args);
  classify->add_option("--out", common.out, "result file (default stdout)");

  auto* detect = app.add_subcommand("detect", "find strokes in long videos");
  ModelArgs detect_args;
  std::optional<double> threshold;
  std::optional<std::size_t> min_length;
  add_model_args(detect, detect_args);
  detect->add_option("--threshold", threshold, "stroke score threshold in (0, 1)");
  detect->add_option("--min-length", min_length, "shortest kept segment in frames");
  detect->add_option("--out", common.out, "segment file (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
  std::string task = "detect", pred, gt;
  bool per_class = false;
  evaluate->add_option("--task", task, "classify or detect");
  evaluate->add_option("--pred", pred, "predictions")->required();
  evaluate->add_option("--gt", gt, "ground truth: dataset manifest, annotation or segment files")->required();
  evaluate->add_flag("--per-class", per_class, "average detection AP over labels");
  evaluate->add_option("--out", common.out, "report file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (common.threads > 0) omp_set_num_threads(common.threads);
    if (*synth) return cmd_synth(spec_file, preset, seed, synth_out, out);
    if (*render) return cmd_render(frames_path, poses_path, mode, render_out, out, err);
    if (*train) return cmd_train(train_config, train_out, common, out);
    if (*classify) return cmd_classify(classify_args, common, out, err);
    if (*detect) return cmd_detect(detect_args, threshold, min_length, common, out, err);
    if (*evaluate) return cmd_evaluate(task, pred, gt, per_class, common, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const ConfigMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kMismatch;
  } catch (const PairingError& e) {
    err << "error: " << e.what() << "\n";
    return kPairing;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace strokenet::cli
