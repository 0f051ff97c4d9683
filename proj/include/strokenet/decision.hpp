// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

// Turning per-window class probabilities into clip labels and temporal
// segments, and scoring both.

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace strokenet {

struct WindowPrediction {
  std::size_t start = 0;
  std::size_t length = 0;
  std::vector<double> probs;

  double center() const { return static_cast<double>(start) + static_cast<double>(length) / 2.0; }
};

// Half-open frame interval [begin, end).
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t label = 0;
  double score = 1.0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class DecisionKind { no_window, gaussian, mean, vote, vote_sliding };

struct DecisionMethod {
  DecisionKind kind = DecisionKind::vote_sliding;
  // GAUSSIAN width in frames; zero means a quarter of the window length.
  double sigma = 0.0;
  std::size_t stride = 1;

  void validate() const;
  double sigma_for(std::size_t window) const;
  friend bool operator==(const DecisionMethod&, const DecisionMethod&) = default;
};

std::string to_string(DecisionKind kind);
// Accepts no_window, gaussian, mean, vote, vote_sliding (case-insensitive,
// '-' allowed for '_'). Throws std::invalid_argument.
DecisionKind parse_decision_kind(std::string_view name);
void to_json(nlohmann::json& j, const DecisionMethod& m);
void from_json(const nlohmann::json& j, DecisionMethod& m);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

// Window starts 0, stride, 2·stride, ... plus a final start aligned to the
// end so every frame is covered. A video shorter than the window gets none.
std::vector<std::size_t> sliding_starts(std::size_t frame_count, std::size_t window, std::size_t stride);

struct ClipDecision {
  std::size_t label = 0;
  std::vector<double> probs;  // distribution whose argmax is `label`
  std::vector<std::size_t> votes;  // per-class argmax counts over the windows
};

// Combines the windows of one stroke whose midpoint is `midpoint` (frames).
//   NO_WINDOW  probs of the window centred nearest the midpoint (earliest on ties)
//   MEAN       uniform average of probs
//   GAUSSIAN   average weighted by exp(-d²/2σ²), d = centre - midpoint
//   VOTE, VOTE_SLIDING  majority of per-window argmaxes, ties to the lowest id;
//              probs are the mean over the windows that voted for the winner
// Throws std::invalid_argument on empty input or inconsistent class counts.
ClipDecision aggregate_clip(std::span<const WindowPrediction> preds, const DecisionMethod& method,
                            double midpoint, std::size_t window);

// Per-frame fraction of covering windows whose argmax is `stroke_class`.
// Uncovered frames are 0.
std::vector<double> vote_sliding_window(std::span<const WindowPrediction> preds, std::size_t num_frames,
                                        std::size_t stroke_class = 1);

// Per-frame stroke probability under any method. VOTE and VOTE_SLIDING give
// vote_sliding_window; the others apply their clip rule with each frame as
// the midpoint, restricted to the windows covering that frame.
std::vector<double> frame_curve(std::span<const WindowPrediction> preds, std::size_t num_frames,
                                const DecisionMethod& method, std::size_t window, std::size_t stroke_class = 1);

// Maximal runs with value >= threshold, at least min_length long. Score is
// the mean curve value over the run. threshold must lie in (0, 1).
std::vector<Segment> extract_segments(std::span<const double> curve, double threshold, std::size_t min_length,
                                      std::size_t label = 0);

double temporal_iou(const Segment& a, const Segment& b);

// Predictions and ground truth of one video.
struct VideoSegments {
  std::string video;
  std::vector<Segment> predictions;
  std::vector<Segment> ground_truth;
};

// AP at one IoU threshold, pooled over videos, ignoring labels. Predictions
// are ranked by score (ties by begin, then video order) and each takes the
// unmatched ground truth of its video with the highest IoU >= threshold.
// Precision is made monotone before integrating over recall.
double average_precision(std::span<const VideoSegments> videos, double iou_threshold);
double average_precision(std::span<const Segment> preds, std::span<const Segment> gt, double iou_threshold);

// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> map_thresholds();

// Mean AP over map_thresholds(). With per_class, AP is computed per label
// (union of labels seen in either side) and averaged.
double map_score(std::span<const VideoSegments> videos, bool per_class = false);

struct IouSummary {
  std::size_t matched = 0;
  double mean_matched_iou = 0.0;  // over matched pairs only
  double mean_gt_iou = 0.0;       // unmatched ground truth counts as 0
  std::vector<double> gt_iou;     // per ground-truth segment, video order
};

// Greedy score-order matching at any positive overlap.
IouSummary iou_summary(std::span<const VideoSegments> videos);

struct ClassificationMetrics {
  double accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

// num_classes 0 infers it from the largest label.
ClassificationMetrics classification_metrics(std::span<const std::size_t> predicted,
                                             std::span<const std::size_t> truth, std::size_t num_classes = 0);

// Exchange format: {"video": name, "segments": [{"begin","end","label","score"}]}.
struct SegmentFile {
  std::string video;
  std::vector<Segment> segments;
  friend bool operator==(const SegmentFile&, const SegmentFile&) = default;
};

void to_json(nlohmann::json& j, const Segment& s);
void from_json(const nlohmann::json& j, Segment& s);
void to_json(nlohmann::json& j, const SegmentFile& f);
// Also accepts an annotation file ({"video","frame_count","strokes"}),
// giving every stroke score 1.
void from_json(const nlohmann::json& j, SegmentFile& f);

// A file holds one object or an array of them. Throws InputError.
std::vector<SegmentFile> load_segment_files(const std::filesystem::path& path);
void save_segment_file(const std::filesystem::path& path, const SegmentFile& file);

// Pairs predictions with ground truth by video name. Throws PairingError when
// the name sets differ or a name repeats.
std::vector<VideoSegments> pair_videos(const std::vector<SegmentFile>& preds, const std::vector<SegmentFile>& gt);

// {"task":"detect","videos","ground_truth","predictions","ap":{"0.50":..},
//  "map","map_50","matched","mean_matched_iou","mean_gt_iou","gt_iou":[..]}
nlohmann::json detection_report(std::span<const VideoSegments> videos, bool per_class = false);
// {"task":"classify","count","accuracy","confusion"}
nlohmann::json classification_report(const ClassificationMetrics& m, std::size_t count);

}  // namespace strokenet
