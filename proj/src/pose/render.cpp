// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "strokenet/pose.hpp"

namespace strokenet {

Rgb SkeletonSpec::group_color(LimbGroup group) {
  switch (group) {
    case LimbGroup::head:
      return {255, 64, 64};
    case LimbGroup::torso:
      return {255, 255, 64};
    case LimbGroup::left_arm:
      return {64, 255, 64};
    case LimbGroup::right_arm:
      return {64, 64, 255};
    case LimbGroup::left_leg:
      return {255, 64, 255};
    case LimbGroup::right_leg:
      return {64, 255, 255};
  }
  return {};
}

SkeletonSpec SkeletonSpec::coco() {
  using G = LimbGroup;
  SkeletonSpec spec;
  const auto edge = [](std::size_t a, std::size_t b, G g) { return SkeletonEdge{a, b, group_color(g)}; };
  spec.edges = {
      edge(kNose, kLeftEye, G::head),           edge(kNose, kRightEye, G::head),
      edge(kLeftEye, kRightEye, G::head),       edge(kLeftEye, kLeftEar, G::head),
      edge(kRightEye, kRightEar, G::head),      edge(kLeftEar, kLeftShoulder, G::head),
      edge(kRightEar, kRightShoulder, G::head), edge(kLeftShoulder, kRightShoulder, G::torso),
      edge(kLeftShoulder, kLeftHip, G::torso),  edge(kRightShoulder, kRightHip, G::torso),
      edge(kLeftHip, kRightHip, G::torso),      edge(kLeftShoulder, kLeftElbow, G::left_arm),
      edge(kLeftElbow, kLeftWrist, G::left_arm), edge(kRightShoulder, kRightElbow, G::right_arm),
      edge(kRightElbow, kRightWrist, G::right_arm), edge(kLeftHip, kLeftKnee, G::left_leg),
      edge(kLeftKnee, kLeftAnkle, G::left_leg), edge(kRightHip, kRightKnee, G::right_leg),
      edge(kRightKnee, kRightAnkle, G::right_leg),
  };
  const G groups[kNumKeypoints] = {G::head,      G::head,      G::head,     G::head,      G::head,
                                   G::torso,     G::torso,     G::left_arm, G::right_arm, G::left_arm,
                                   G::right_arm, G::torso,     G::torso,    G::left_leg,  G::right_leg,
                                   G::left_leg,  G::right_leg};
  for (std::size_t k = 0; k < kNumKeypoints; ++k) spec.keypoint_colors[k] = group_color(groups[k]);
  return spec;
}

void SkeletonSpec::validate() const {
  for (const auto& e : edges) {
    if (e.from >= kNumKeypoints || e.to >= kNumKeypoints) {
      throw std::invalid_argument("skeleton edge index outside [0,17)");
    }
  }
  if (line_thickness < 1) throw std::invalid_argument("line_thickness must be >= 1");
  if (keypoint_radius < 0) throw std::invalid_argument("keypoint_radius must be >= 0");
}

namespace {

// Far-away coordinates are clamped so integer stepping stays bounded.
constexpr long kCoordLimit = 1L << 20;

bool to_pixel(double v, long& out) {
  if (!std::isfinite(v)) return false;
  const double r = std::floor(v + 0.5);
  out = static_cast<long>(std::clamp(r, double(-kCoordLimit), double(kCoordLimit)));
  return true;
}

void stamp_square(Image& img, long cx, long cy, int thickness, Rgb color) {
  const long lo = -(thickness - 1) / 2;
  const long hi = thickness / 2;
  for (long dy = lo; dy <= hi; ++dy) {
    for (long dx = lo; dx <= hi; ++dx) {
      const long x = cx + dx, y = cy + dy;
      if (img.contains(static_cast<int>(x), static_cast<int>(y))) img.set(int(x), int(y), color);
    }
  }
}

// Integer midpoint (Bresenham) line with a square brush at every step.
void draw_line(Image& img, long x0, long y0, long x1, long y1, int thickness, Rgb color) {
  const long margin = thickness;
  if (std::max(x0, x1) < -margin || std::min(x0, x1) >= img.width() + margin ||
      std::max(y0, y1) < -margin || std::min(y0, y1) >= img.height() + margin) {
    return;
  }
  const long dx = std::labs(x1 - x0), dy = -std::labs(y1 - y0);
  const long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  while (true) {
    stamp_square(img, x0, y0, thickness, color);
    if (x0 == x1 && y0 == y1) break;
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_disc(Image& img, long cx, long cy, int radius, Rgb color) {
  for (long dy = -radius; dy <= radius; ++dy) {
    for (long dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy > long(radius) * radius) continue;
      const long x = cx + dx, y = cy + dy;
      if (img.contains(static_cast<int>(x), static_cast<int>(y))) img.set(int(x), int(y), color);
    }
  }
}

}  // namespace

void rasterize_skeleton(Image& canvas, const std::vector<PersonPose>& persons, const SkeletonSpec& spec) {
  spec.validate();
  for (const auto& person : persons) {
    if (!(person.score >= spec.person_threshold)) continue;
    const auto visible = [&](std::size_t k) {
      return person.keypoints[k].confidence >= spec.keypoint_threshold;
    };
    for (const auto& e : spec.edges) {
      if (!visible(e.from) || !visible(e.to)) continue;
      long x0, y0, x1, y1;
      const auto& a = person.keypoints[e.from];
      const auto& b = person.keypoints[e.to];
      if (!to_pixel(a.x, x0) || !to_pixel(a.y, y0) || !to_pixel(b.x, x1) || !to_pixel(b.y, y1)) continue;
      draw_line(canvas, x0, y0, x1, y1, spec.line_thickness, e.color);
    }
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      if (!visible(k)) continue;
      long x, y;
      if (!to_pixel(person.keypoints[k].x, x) || !to_pixel(person.keypoints[k].y, y)) continue;
      draw_disc(canvas, x, y, spec.keypoint_radius, spec.keypoint_colors[k]);
    }
  }
}

Image compose_frame(RenderMode mode, const Image* base, const PoseFrame& poses, const SkeletonSpec& spec,
                    std::pair<int, int> size) {
  Image canvas;
  if (mode == RenderMode::overlay) {
    if (base == nullptr) throw std::invalid_argument("overlay rendering requires a base frame");
    canvas = *base;
  } else {
    canvas = Image(size.first, size.second);
  }
  rasterize_skeleton(canvas, poses.persons, spec);
  return canvas;
}

}  // namespace strokenet
