// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "strokenet/image.hpp"
#include "strokenet/rng.hpp"
#include "strokenet/tensor.hpp"

namespace strokenet {

// Frames of one video, all the same size, indexed from 0.
struct FrameSequence {
  std::vector<Image> frames;

  std::size_t frame_count() const { return frames.size(); }
  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }
  // Throws InputError if frame sizes differ.
  void validate() const;
};

// Name of frame i inside a frame directory: frame_%06d.png.
std::string frame_file_name(std::size_t index);

// Accepts a directory of frame_%06d.png files (contiguous from 0) or a TTEN
// file holding a T×H×W×3 tensor of integral pixel values in [0, 255].
FrameSequence load_frame_sequence(const std::filesystem::path& path);
void save_frame_directory(const std::filesystem::path& dir, const FrameSequence& seq);
void save_frame_tten(const std::filesystem::path& path, const FrameSequence& seq);
// T×H×W×3 f32 tensor of raw pixel values, the TTEN video payload.
Tensor<float> frames_to_tensor(const FrameSequence& seq);
FrameSequence frames_from_tensor(const Tensor<float>& pixels);

// Half-open frame interval [begin, end) carrying a class id.
struct StrokeAnnotation {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t label = 0;
  std::size_t length() const { return end - begin; }
  friend bool operator==(const StrokeAnnotation&, const StrokeAnnotation&) = default;
};

struct VideoAnnotations {
  std::string video;
  std::size_t frame_count = 0;
  std::vector<StrokeAnnotation> strokes;  // sorted by begin, disjoint
  friend bool operator==(const VideoAnnotations&, const VideoAnnotations&) = default;
};

// Sorts strokes and checks bounds, labels (< num_classes) and overlaps.
// Errors name the offending stroke indices in input order.
void validate_annotations(VideoAnnotations& ann, std::size_t num_classes);
// {"video": name, "frame_count": N, "strokes": [{"begin", "end", "label"}]}
VideoAnnotations load_annotations(const std::filesystem::path& path, std::size_t num_classes);
VideoAnnotations parse_annotations(std::string_view text, std::size_t num_classes);
void save_annotations(const std::filesystem::path& path, const VideoAnnotations& ann);
std::string annotations_json(const VideoAnnotations& ann);

// A window of `length` real frames starting at `start`, extended to the model
// window by repeating the first frame pad_before times and the last frame
// pad_after times.
struct WindowSample {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t pad_before = 0;
  std::size_t pad_after = 0;
  std::size_t label = 0;
  std::size_t video = 0;  // index into the caller's video list
  std::size_t total() const { return pad_before + length + pad_after; }
  friend bool operator==(const WindowSample&, const WindowSample&) = default;
};

// Window of `window` frames for one stroke: a uniformly placed sub-window when
// the stroke is long enough, otherwise the whole stroke centred by edge
// repetition (the extra odd frame goes after).
WindowSample stroke_window(const StrokeAnnotation& stroke, std::size_t window, Rng& rng);

// One window per stroke, labelled with the stroke class.
std::vector<WindowSample> sample_class_windows(const VideoAnnotations& ann, std::size_t window, Rng& rng);

// Detection labels.
inline constexpr std::size_t kNonStroke = 0;
inline constexpr std::size_t kStroke = 1;

// `per_stroke` positive windows inside each stroke (label kStroke) and
// round(ratio * positives) negatives (label kNonStroke) drawn uniformly from
// the starts whose window overlaps no stroke. Throws InputError when no such
// start exists.
std::vector<WindowSample> sample_detection_windows(const VideoAnnotations& ann, std::size_t window,
                                                   double ratio, Rng& rng, std::size_t per_stroke = 1);

// Writes one 3×T×H×W clip of pixel values / 255 into `out` (3·T·H·W floats).
void write_clip(const FrameSequence& seq, const WindowSample& sample, std::span<float> out);
// Stacks clips into an N×3×T×H×W tensor. `videos[s.video]` supplies sample s.
Tensor<float> make_batch(std::span<const FrameSequence* const> videos, std::span<const WindowSample> samples);

}  // namespace strokenet
