// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "strokenet/errors.hpp"

namespace strokenet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr Rgb kBlobColor{255, 220, 96};

struct Point {
  double x;
  double y;
};

// Rest pose in units of min(width, height), relative to the body centre.
constexpr std::array<Point, kNumKeypoints> kRestPose = {{
    {0.00, -0.30},   // nose
    {0.03, -0.32},   // left eye
    {-0.03, -0.32},  // right eye
    {0.06, -0.31},   // left ear
    {-0.06, -0.31},  // right ear
    {0.12, -0.18},   // left shoulder
    {-0.12, -0.18},  // right shoulder
    {0.16, -0.04},   // left elbow
    {-0.16, -0.04},  // right elbow
    {0.17, 0.08},    // left wrist
    {-0.17, 0.08},   // right wrist
    {0.08, 0.08},    // left hip
    {-0.08, 0.08},   // right hip
    {0.09, 0.25},    // left knee
    {-0.09, 0.25},   // right knee
    {0.10, 0.40},    // left ankle
    {-0.10, 0.40},   // right ankle
}};

void fill_disc(Image& img, Point c, double r, Rgb color) {
  const int y0 = static_cast<int>(std::floor(c.y - r)), y1 = static_cast<int>(std::ceil(c.y + r));
  const int x0 = static_cast<int>(std::floor(c.x - r)), x1 = static_cast<int>(std::ceil(c.x + r));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - c.x, dy = y + 0.5 - c.y;
      if (dx * dx + dy * dy <= r * r && img.contains(x, y)) img.set(x, y, color);
    }
  }
}

std::string clip_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%04zu", i);
  return buf;
}

// Per-clip variation of the class path.
struct ClipJitter {
  double dx, dy, speed;
};

Point blob_position(const SyntheticSpec& spec, const ClassMotion& m, const ClipJitter& jitter, double u) {
  const double size = std::min(spec.width, spec.height);
  const double cx = spec.width / 2.0 + jitter.dx * size, cy = spec.height / 2.0 + jitter.dy * size;
  const double rx = std::cos(m.angle), ry = std::sin(m.angle);
  const double along = (u - 0.5) * m.speed * jitter.speed * size;
  const double wobble = m.oscillation * size * std::sin(2.0 * std::numbers::pi * m.cycles * u);
  const double radius = 0.22 * size + wobble;
  return {cx + radius * rx - along * ry, cy + radius * ry + along * rx};
}

PersonPose skeleton(const SyntheticSpec& spec, const Point* wrist) {
  const double size = std::min(spec.width, spec.height);
  const Point body{spec.width / 2.0, spec.height * 0.55};
  PersonPose p;
  p.score = 0.95;
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    p.keypoints[k] = {body.x + kRestPose[k].x * size, body.y + kRestPose[k].y * size, 0.9};
  }
  if (wrist) {
    auto& w = p.keypoints[kRightWrist];
    const auto& s = p.keypoints[kRightShoulder];
    w.x = wrist->x;
    w.y = wrist->y;
    p.keypoints[kRightElbow].x = (s.x + w.x) / 2.0;
    p.keypoints[kRightElbow].y = (s.y + w.y) / 2.0;
  }
  return p;
}

}  // namespace

void SyntheticSpec::validate() const {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("synthetic spec field '" + field + "': " + why);
  };
  if (num_classes == 0) fail("num_classes", "must be positive");
  if (clips_per_class == 0) fail("clips_per_class", "must be positive");
  if (width < 4 || height < 4) fail("width", "frames must be at least 4x4");
  if (strokes_per_clip == 0) fail("strokes_per_clip", "must be positive");
  if (stroke_min == 0 || stroke_min > stroke_max) fail("stroke_min", "need 0 < stroke_min <= stroke_max");
  if (frame_count < strokes_per_clip * stroke_max) {
    fail("frame_count", std::to_string(frame_count) + " frames cannot hold " + std::to_string(strokes_per_clip) +
                            " strokes of up to " + std::to_string(stroke_max) + " frames");
  }
  if (!(blob_radius > 0.0 && blob_radius <= 0.5)) fail("blob_radius", "must lie in (0, 0.5]");
  if (noise < 1 || noise > 256) fail("noise", "must lie in [1, 256]");
  if (!motions.empty() && motions.size() != num_classes) {
    fail("motions", "needs one entry per class, got " + std::to_string(motions.size()));
  }
}

ClassMotion SyntheticSpec::motion(std::size_t label) const {
  if (!motions.empty()) return motions.at(label);
  ClassMotion m;
  m.angle = std::numbers::pi / 4.0 + 2.0 * std::numbers::pi * static_cast<double>(label) /
                                        static_cast<double>(num_classes);
  m.speed = 0.3 + 0.1 * static_cast<double>(label % 3);
  m.oscillation = label % 2 ? 0.05 : 0.0;
  m.cycles = 1.0 + static_cast<double>(label % 2);
  return m;
}

SyntheticSpec SyntheticSpec::classification() { return {}; }

SyntheticSpec SyntheticSpec::detection() {
  SyntheticSpec s;
  s.num_classes = 1;
  s.clips_per_class = 1;
  s.frame_count = 2000;
  s.strokes_per_clip = 10;
  s.stroke_min = 60;
  s.stroke_max = 100;
  return s;
}

void to_json(json& j, const ClassMotion& m) {
  j = {{"angle", m.angle}, {"speed", m.speed}, {"oscillation", m.oscillation}, {"cycles", m.cycles}};
}

void from_json(const json& j, ClassMotion& m) {
  m.angle = j.value("angle", m.angle);
  m.speed = j.value("speed", m.speed);
  m.oscillation = j.value("oscillation", m.oscillation);
  m.cycles = j.value("cycles", m.cycles);
}

void to_json(json& j, const SyntheticSpec& s) {
  j = {{"num_classes", s.num_classes},
       {"clips_per_class", s.clips_per_class},
       {"frame_count", s.frame_count},
       {"width", s.width},
       {"height", s.height},
       {"strokes_per_clip", s.strokes_per_clip},
       {"stroke_length", {s.stroke_min, s.stroke_max}},
       {"motions", s.motions},
       {"blob_radius", s.blob_radius},
       {"noise", s.noise},
       {"seed", s.seed}};
}

void from_json(const json& j, SyntheticSpec& s) {
  s.num_classes = j.value("num_classes", s.num_classes);
  s.clips_per_class = j.value("clips_per_class", s.clips_per_class);
  s.frame_count = j.value("frame_count", s.frame_count);
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.strokes_per_clip = j.value("strokes_per_clip", s.strokes_per_clip);
  if (j.contains("stroke_length")) {
    const auto& len = j.at("stroke_length");
    if (!len.is_array() || len.size() != 2) throw std::invalid_argument("stroke_length must be [min, max]");
    s.stroke_min = len[0].get<std::size_t>();
    s.stroke_max = len[1].get<std::size_t>();
  }
  if (j.contains("motions")) s.motions = j.at("motions").get<std::vector<ClassMotion>>();
  s.blob_radius = j.value("blob_radius", s.blob_radius);
  s.noise = j.value("noise", s.noise);
  s.seed = j.value("seed", s.seed);
}

SyntheticSpec load_synthetic_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open synthetic spec " + path.string());
  SyntheticSpec spec;
  try {
    from_json(json::parse(in), spec);
    spec.validate();
  } catch (const std::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return spec;
}

std::vector<SyntheticVideo> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng master(spec.seed);
  std::vector<SyntheticVideo> out;
  out.reserve(spec.clip_count());
  const double size = std::min(spec.width, spec.height);
  const double blob_radius = std::max(1.5, spec.blob_radius * size);
  std::size_t stroke_counter = 0;

  for (std::size_t clip = 0; clip < spec.clip_count(); ++clip) {
    Rng rng(master.next());
    SyntheticVideo video;
    video.annotations.video = clip_name(clip);
    video.annotations.frame_count = spec.frame_count;

    const std::size_t slot = spec.frame_count / spec.strokes_per_clip;
    std::vector<ClipJitter> jitters;
    for (std::size_t s = 0; s < spec.strokes_per_clip; ++s) {
      const std::size_t len = spec.stroke_min + rng.below(spec.stroke_max - spec.stroke_min + 1);
      const std::size_t begin = s * slot + rng.below(slot - len + 1);
      const std::size_t label =
          spec.strokes_per_clip == 1 ? clip % spec.num_classes : stroke_counter++ % spec.num_classes;
      video.annotations.strokes.push_back({begin, begin + len, label});
      jitters.push_back({rng.uniform(-0.04, 0.04), rng.uniform(-0.04, 0.04), rng.uniform(0.85, 1.15)});
    }

    std::size_t next_stroke = 0;
    for (std::size_t f = 0; f < spec.frame_count; ++f) {
      Image frame(spec.width, spec.height);
      for (auto& b : frame.mutable_bytes()) b = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(spec.noise)));
      while (next_stroke < video.annotations.strokes.size() && video.annotations.strokes[next_stroke].end <= f) {
        ++next_stroke;
      }
      std::optional<Point> wrist;
      if (next_stroke < video.annotations.strokes.size()) {
        const auto& stroke = video.annotations.strokes[next_stroke];
        if (f >= stroke.begin) {
          const double u = stroke.length() > 1 ? static_cast<double>(f - stroke.begin) /
                                                     static_cast<double>(stroke.length() - 1)
                                               : 0.5;
          wrist = blob_position(spec, spec.motion(stroke.label), jitters[next_stroke], u);
          fill_disc(frame, *wrist, blob_radius, kBlobColor);
        }
      }
      video.frames.frames.push_back(std::move(frame));
      video.poses.push_back({f, {skeleton(spec, wrist ? &*wrist : nullptr)}});
    }
    out.push_back(std::move(video));
  }
  return out;
}

Manifest write_synthetic_dataset(const SyntheticSpec& spec, const fs::path& out_dir) {
  const auto videos = generate_synthetic(spec);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw InputError("cannot create output directory " + out_dir.string());

  Manifest manifest;
  const auto write_text = [&](const fs::path& rel, const std::string& text) {
    std::ofstream out(out_dir / rel, std::ios::binary);
    out << text;
    if (!out) throw InputError("failed writing " + (out_dir / rel).string());
    manifest.files.push_back(rel.generic_string());
  };

  for (const auto& v : videos) {
    const fs::path dir = v.annotations.video;
    VideoEntry entry{v.annotations.video, dir / "frames", dir / "keypoints.jsonl", dir / "annotations.json"};
    save_frame_directory(out_dir / entry.frames, v.frames);
    for (std::size_t f = 0; f < v.frames.frame_count(); ++f) {
      manifest.files.push_back((entry.frames / frame_file_name(f)).generic_string());
    }
    std::ostringstream kp;
    write_keypoint_stream(kp, v.poses);
    write_text(entry.keypoints, kp.str());
    write_text(entry.annotations, annotations_json(v.annotations));
    manifest.videos.push_back(std::move(entry));
  }
  write_text("spec.json", json(spec).dump(2) + "\n");
  std::sort(manifest.files.begin(), manifest.files.end());

  json list = json::array();
  for (const auto& e : manifest.videos) {
    list.push_back({{"name", e.name},
                    {"frames", e.frames.generic_string()},
                    {"keypoints", e.keypoints.generic_string()},
                    {"annotations", e.annotations.generic_string()}});
  }
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  out << json{{"videos", list}, {"files", manifest.files}}.dump(2) << "\n";
  if (!out) throw InputError("failed writing " + (out_dir / "manifest.json").string());
  return manifest;
}

Manifest load_manifest(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "manifest.json" : path;
  std::ifstream in(file);
  if (!in) throw InputError("cannot open manifest " + file.string());
  const fs::path root = file.parent_path();
  Manifest m;
  try {
    const json j = json::parse(in);
    for (const auto& v : j.at("videos")) {
      m.videos.push_back({v.at("name").get<std::string>(), root / v.at("frames").get<std::string>(),
                          root / v.value("keypoints", std::string()), root / v.at("annotations").get<std::string>()});
      if (!v.contains("keypoints")) m.videos.back().keypoints.clear();
    }
    if (j.contains("files")) m.files = j.at("files").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InputError(file.string() + ": " + e.what());
  }
  return m;
}

}  // namespace strokenet
