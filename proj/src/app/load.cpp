// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>

#include "strokenet/errors.hpp"
#include "strokenet/pipeline.hpp"

namespace strokenet {

namespace fs = std::filesystem;

namespace {

bool needs_poses(const RunConfig& cfg) {
  for (auto s : cfg.inputs)
    if (s != StreamInput::rgb) return true;
  return false;
}

std::size_t annotation_classes(const RunConfig& cfg) {
  // Detection ignores the stroke class, so any label is accepted.
  return cfg.task == Task::classify ? cfg.model.num_classes : std::numeric_limits<std::size_t>::max();
}

}  // namespace

FrameSequence render_stream(const FrameSequence& frames, const std::vector<PoseFrame>& poses, StreamInput input,
                            const SkeletonSpec& spec) {
  if (input == StreamInput::rgb) return frames;
  const RenderMode mode = input == StreamInput::pose ? RenderMode::black : RenderMode::overlay;
  const std::pair<int, int> size{frames.width(), frames.height()};
  const PoseFrame empty;
  FrameSequence out;
  out.frames.reserve(frames.frame_count());
  for (std::size_t f = 0; f < frames.frame_count(); ++f) {
    const PoseFrame& pose = f < poses.size() ? poses[f] : empty;
    out.frames.push_back(compose_frame(mode, &frames.frames[f], pose, spec, size));
  }
  return out;
}

LoadedVideo load_video(const VideoEntry& entry, const RunConfig& cfg, bool need_annotations) {
  LoadedVideo v;
  v.name = entry.name;
  v.frames = load_frame_sequence(entry.frames);
  const auto n = v.frames.frame_count();
  if (n == 0) throw InputError("video " + entry.name + " has no frames");
  if (static_cast<std::size_t>(v.frames.width()) != cfg.model.width ||
      static_cast<std::size_t>(v.frames.height()) != cfg.model.height) {
    throw InputError("video " + entry.name + " is " + std::to_string(v.frames.width()) + "x" +
                     std::to_string(v.frames.height()) + " but the model expects " + std::to_string(cfg.model.width) +
                     "x" + std::to_string(cfg.model.height));
  }

  if (needs_poses(cfg)) {
    if (entry.keypoints.empty() || !fs::exists(entry.keypoints))
      throw InputError("video " + entry.name + ": keypoint stream " + entry.keypoints.string() + " not found");
    v.poses = parse_keypoint_stream(entry.keypoints, n);
    if (v.poses.size() > n) {
      v.warnings.push_back("video " + entry.name + ": keypoints cover " + std::to_string(v.poses.size()) +
                           " frames but the video has " + std::to_string(n) + "; extra poses ignored");
      v.poses.resize(n);
    }
  }

  if (!entry.annotations.empty() && fs::exists(entry.annotations)) {
    v.annotations = load_annotations(entry.annotations, annotation_classes(cfg));
    if (v.annotations.frame_count != n) {
      throw InputError("video " + entry.name + ": annotations say " + std::to_string(v.annotations.frame_count) +
                       " frames but the video has " + std::to_string(n));
    }
    if (!v.annotations.video.empty()) v.name = v.annotations.video;
  } else if (need_annotations) {
    throw InputError("video " + entry.name + ": annotations " + entry.annotations.string() + " not found");
  } else {
    v.annotations = {v.name, n, {}};
  }

  for (auto input : cfg.inputs) v.streams.push_back(render_stream(v.frames, v.poses, input));
  return v;
}

LoadedVideo load_video_dir(const fs::path& dir, const RunConfig& cfg) {
  if (!fs::is_directory(dir)) throw InputError("clip directory " + dir.string() + " not found");
  VideoEntry e;
  e.name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  e.frames = fs::exists(dir / "frames") ? dir / "frames" : dir / "frames.tten";
  if (!fs::exists(e.frames)) throw InputError(dir.string() + " holds neither frames/ nor frames.tten");
  e.keypoints = dir / "keypoints.jsonl";
  e.annotations = dir / "annotations.json";
  return load_video(e, cfg, false);
}

std::vector<LoadedVideo> load_dataset(const fs::path& manifest, const RunConfig& cfg) {
  const Manifest m = load_manifest(manifest);
  if (m.videos.empty()) throw InputError("dataset " + manifest.string() + " lists no videos");
  std::vector<LoadedVideo> out;
  out.reserve(m.videos.size());
  for (const auto& e : m.videos) out.push_back(load_video(e, cfg, true));
  return out;
}

LoadedVideo from_synthetic(const SyntheticVideo& video, const RunConfig& cfg) {
  LoadedVideo v;
  v.name = video.annotations.video;
  v.frames = video.frames;
  if (needs_poses(cfg)) v.poses = video.poses;
  v.annotations = video.annotations;
  validate_annotations(v.annotations, annotation_classes(cfg));
  for (auto input : cfg.inputs) v.streams.push_back(render_stream(v.frames, v.poses, input));
  return v;
}

}  // namespace strokenet
