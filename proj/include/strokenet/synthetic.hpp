// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "strokenet/pose.hpp"
#include "strokenet/video.hpp"

namespace strokenet {

// Path of a stroke's blob, in units of min(width, height). The path is a
// segment tangent to a circle around the frame centre at polar angle `angle`,
// traversed at `speed` per stroke, wobbling radially with `oscillation`
// amplitude and `cycles` periods.
struct ClassMotion {
  double angle = 0.0;
  double speed = 0.35;
  double oscillation = 0.0;
  double cycles = 1.0;
  friend bool operator==(const ClassMotion&, const ClassMotion&) = default;
};

struct SyntheticSpec {
  std::size_t num_classes = 4;
  std::size_t clips_per_class = 32;
  std::size_t frame_count = 16;
  int width = 32;
  int height = 32;
  // Strokes per clip, each placed inside its own equal slot of the clip.
  std::size_t strokes_per_clip = 1;
  std::size_t stroke_min = 16;
  std::size_t stroke_max = 16;
  // One entry per class; empty selects built-in motions.
  std::vector<ClassMotion> motions;
  // Blob radius as a fraction of min(width, height), at least 1.5 pixels.
  double blob_radius = 0.1;
  // Background pixels are uniform in [0, noise).
  int noise = 48;
  std::uint64_t seed = 1;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;

  void validate() const;
  ClassMotion motion(std::size_t label) const;
  std::size_t clip_count() const { return num_classes * clips_per_class; }

  // 4 classes × 32 clips of 16 frames at 32×32, one stroke filling each clip.
  static SyntheticSpec classification();
  // One 2000-frame 32×32 video with 10 strokes of 60 to 100 frames.
  static SyntheticSpec detection();
};

void to_json(nlohmann::json& j, const ClassMotion& m);
void from_json(const nlohmann::json& j, ClassMotion& m);
void to_json(nlohmann::json& j, const SyntheticSpec& spec);
// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, SyntheticSpec& spec);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

struct SyntheticVideo {
  FrameSequence frames;
  std::vector<PoseFrame> poses;
  VideoAnnotations annotations;  // annotations.video is the clip name
};

// Pure function of the spec. Clip i carries label i % num_classes when it
// holds one stroke; with several strokes, labels cycle over the strokes.
std::vector<SyntheticVideo> generate_synthetic(const SyntheticSpec& spec);

// Dataset listing, stored as manifest.json at the dataset root.
struct VideoEntry {
  std::string name;
  std::filesystem::path frames;       // frame directory or TTEN file
  std::filesystem::path keypoints;    // JSON-lines keypoint stream
  std::filesystem::path annotations;  // annotation JSON
};

struct Manifest {
  // Relative to the dataset root as written; load_manifest resolves them.
  std::vector<VideoEntry> videos;
  std::vector<std::string> files;  // every file written, relative, sorted
};

// Writes <out>/<clip>/frames/frame_%06d.png, keypoints.jsonl and
// annotations.json per clip, plus spec.json and manifest.json.
Manifest write_synthetic_dataset(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

// Loads manifest.json (or the file itself) and resolves entry paths against
// its directory.
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace strokenet
