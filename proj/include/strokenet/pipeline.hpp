// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end runs: loading datasets, building stream inputs, training,
// classifying clips and detecting strokes in long videos.

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "strokenet/decision.hpp"
#include "strokenet/model.hpp"
#include "strokenet/pose.hpp"
#include "strokenet/synthetic.hpp"
#include "strokenet/video.hpp"

namespace strokenet {

// Training diverged (CLI exit code 1).
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int epoch) : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// What a branch sees: raw frames, the skeleton on black, or the skeleton
// drawn over the frames.
enum class StreamInput { rgb, pose, prgb };
enum class Task { classify, detect };

std::string to_string(StreamInput input);
std::string to_string(Task task);
StreamInput parse_stream_input(const std::string& name);
Task parse_task(const std::string& name);

struct RunConfig {
  std::string profile = "desk";
  Task task = Task::classify;
  ModelConfig model = ModelConfig::desk();
  OptimizerConfig optimizer;
  // One entry per branch.
  std::vector<StreamInput> inputs{StreamInput::rgb, StreamInput::pose};
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
  // Dataset manifests; relative paths resolve against the config file.
  std::filesystem::path train_data;
  std::filesystem::path validation_data;  // optional
  std::filesystem::path output_dir = "run";
  DecisionMethod decision;
  // Detection only.
  double threshold = 0.5;
  std::size_t min_length = 2;
  double negative_ratio = 1.0;
  std::size_t windows_per_stroke = 1;
  // Stop once an epoch's running train accuracy reaches this; 0 disables.
  double stop_accuracy = 0.0;

  // Throws std::invalid_argument naming the field.
  void validate() const;

  // 32×32×16 desk model, short schedule.
  static RunConfig desk();
  // Published architecture and schedule.
  static RunConfig paper();
  static RunConfig for_profile(const std::string& name);
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
// Keys absent from `j` keep the values already in `cfg`, so a file can
// override a profile preset. "model" and "optimizer" merge the same way;
// "profile" is recorded but does not reapply a preset.
void merge_run_config(const nlohmann::json& j, RunConfig& cfg);
// Loads `path` over the preset for `profile` (or the file's own "profile").
// Relative data paths resolve against the file's directory.
RunConfig load_run_config(const std::filesystem::path& path, const std::optional<std::string>& profile);

// Published results for side-by-side display; never produced by this code.
nlohmann::json reference_results();

// One video with the branch inputs rendered.
struct LoadedVideo {
  std::string name;
  FrameSequence frames;
  std::vector<PoseFrame> poses;  // one per frame
  VideoAnnotations annotations;
  std::vector<FrameSequence> streams;  // one per RunConfig::inputs entry
  std::vector<std::string> warnings;
};

// Renders `input` for every frame; poses beyond the frames are ignored and
// missing ones are treated as empty.
FrameSequence render_stream(const FrameSequence& frames, const std::vector<PoseFrame>& poses, StreamInput input,
                            const SkeletonSpec& spec = SkeletonSpec::coco());

// Loads frames (`frames/` directory or `frames.tten`), `keypoints.jsonl` and,
// if present, `annotations.json` from a clip directory.
LoadedVideo load_video_dir(const std::filesystem::path& dir, const RunConfig& cfg);
LoadedVideo load_video(const VideoEntry& entry, const RunConfig& cfg, bool need_annotations);
std::vector<LoadedVideo> load_dataset(const std::filesystem::path& manifest, const RunConfig& cfg);
// Same as loading the dataset written for `video`, without the disk trip.
LoadedVideo from_synthetic(const SyntheticVideo& video, const RunConfig& cfg);

struct EpochStats {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double train_accuracy = 0.0;  // from the forward passes used for the updates
  std::optional<double> validation_accuracy;
  double seconds = 0.0;
};

// Wall time is left out so logs of identical runs compare equal.
nlohmann::json to_json(const EpochStats& s);

struct TrainResult {
  TwoStreamNet<float> final_model;
  TwoStreamNet<float> best_model;
  std::vector<EpochStats> history;
  int best_epoch = 0;  // 0 means the initial weights
  double best_accuracy = 0.0;
};

// Trains from TwoStreamNet::init(cfg.model, cfg.seed). Each epoch samples a
// fresh window per stroke (classify) or positives and negatives (detect),
// shuffles, and runs SGD in batches. The best model maximises validation
// accuracy when validation data is given, train accuracy otherwise.
// Throws NumericError on a non-finite loss.
TrainResult train(const RunConfig& cfg, const std::vector<LoadedVideo>& train_set,
                  const std::vector<LoadedVideo>* validation_set = nullptr,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

// Writes final.ckpt, best.ckpt, train_log.jsonl and config.json under
// cfg.output_dir; returns the result.
TrainResult run_training(const RunConfig& cfg, std::ostream* progress = nullptr);

// Class probabilities for each window of `video`, in order.
std::vector<WindowPrediction> predict_windows(const TwoStreamNet<float>& net, const LoadedVideo& video,
                                              const std::vector<WindowSample>& windows, std::size_t batch_size);

struct ClipResult {
  std::string video;
  ClipDecision decision;
  DecisionKind method = DecisionKind::mean;
  std::size_t windows = 0;
};

nlohmann::json to_json(const ClipResult& r);

// Treats the whole clip as one stroke: sliding windows at the decision
// stride, or one edge-padded window when the clip is shorter than the model
// window, aggregated around the clip midpoint.
ClipResult classify_clip(const TwoStreamNet<float>& net, const LoadedVideo& video, const DecisionMethod& method,
                         std::size_t batch_size);

// Fixed evaluation windows for a dataset: one per stroke (classify) or one
// per stroke plus matching negatives (detect), drawn from a seeded generator.
std::vector<WindowSample> evaluation_windows(const RunConfig& cfg, const std::vector<LoadedVideo>& videos);

// Fraction of `windows` whose argmax matches the window label.
double window_accuracy(const TwoStreamNet<float>& net, const std::vector<LoadedVideo>& videos,
                       const std::vector<WindowSample>& windows, std::size_t batch_size);

struct DetectionResult {
  SegmentFile segments;
  std::vector<double> curve;  // per-frame stroke score
  bool too_short = false;     // video shorter than the model window
};

DetectionResult detect_video(const TwoStreamNet<float>& net, const LoadedVideo& video,
                             const DecisionMethod& method, double threshold, std::size_t min_length,
                             std::size_t batch_size);

}  // namespace strokenet
