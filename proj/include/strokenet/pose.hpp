// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strokenet/image.hpp"

namespace strokenet {

inline constexpr std::size_t kNumKeypoints = 17;

// COCO keypoint order.
enum CocoKeypoint : std::size_t {
  kNose,
  kLeftEye,
  kRightEye,
  kLeftEar,
  kRightEar,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
  kLeftHip,
  kRightHip,
  kLeftKnee,
  kRightKnee,
  kLeftAnkle,
  kRightAnkle,
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct PersonPose {
  std::array<Keypoint, kNumKeypoints> keypoints{};
  double score = 0.0;
  friend bool operator==(const PersonPose&, const PersonPose&) = default;
};

struct PoseFrame {
  std::size_t frame_index = 0;
  std::vector<PersonPose> persons;
  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

enum class LimbGroup { head, torso, left_arm, right_arm, left_leg, right_leg };

struct SkeletonEdge {
  std::size_t from;
  std::size_t to;
  Rgb color;
};

// Drawing recipe. A person is drawn when score >= person_threshold; an edge
// when both endpoint confidences are >= keypoint_threshold; a keypoint disc
// when its own confidence is >= keypoint_threshold.
struct SkeletonSpec {
  std::vector<SkeletonEdge> edges;
  std::array<Rgb, kNumKeypoints> keypoint_colors{};
  int keypoint_radius = 2;
  int line_thickness = 2;
  double person_threshold = 0.5;
  double keypoint_threshold = 0.3;

  // COCO skeleton coloured by six limb groups.
  static SkeletonSpec coco();
  static Rgb group_color(LimbGroup group);
  // Throws std::invalid_argument on indices >= 17 or nonpositive thickness.
  void validate() const;
};

// One JSON object per line:
//   {"frame": <u32>, "persons": [{"score": s, "keypoints": [[x,y,c] x17]}]}
// Frames come back sorted by index with gaps filled by empty frames. When
// frame_count is given, the result is padded with empty frames up to it.
std::vector<PoseFrame> parse_keypoint_stream(const std::filesystem::path& path,
                                             std::optional<std::size_t> frame_count = std::nullopt);
std::vector<PoseFrame> parse_keypoint_stream(std::istream& in,
                                             std::optional<std::size_t> frame_count = std::nullopt);
void write_keypoint_stream(const std::filesystem::path& path, const std::vector<PoseFrame>& frames);
void write_keypoint_stream(std::ostream& out, const std::vector<PoseFrame>& frames);

void rasterize_skeleton(Image& canvas, const std::vector<PersonPose>& persons,
                        const SkeletonSpec& spec);

enum class RenderMode {
  black,    // skeleton over an all-zero canvas ("Pose")
  overlay,  // skeleton over the source RGB frame ("PRGB")
};

// BLACK uses `size` for the canvas (base is ignored). OVERLAY copies *base and
// throws std::invalid_argument when base is null.
Image compose_frame(RenderMode mode, const Image* base, const PoseFrame& poses,
                    const SkeletonSpec& spec, std::pair<int, int> size);

}  // namespace strokenet
