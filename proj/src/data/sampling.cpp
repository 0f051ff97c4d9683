// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "strokenet/errors.hpp"
#include "strokenet/video.hpp"

namespace strokenet {

WindowSample stroke_window(const StrokeAnnotation& stroke, std::size_t window, Rng& rng) {
  if (window == 0) throw std::invalid_argument("window length must be positive");
  const std::size_t len = stroke.length();
  WindowSample s;
  s.label = stroke.label;
  if (len >= window) {
    s.start = stroke.begin + rng.below(len - window + 1);
    s.length = window;
  } else {
    const std::size_t missing = window - len;
    s.start = stroke.begin;
    s.length = len;
    s.pad_before = missing / 2;
    s.pad_after = missing - missing / 2;
  }
  return s;
}

std::vector<WindowSample> sample_class_windows(const VideoAnnotations& ann, std::size_t window, Rng& rng) {
  std::vector<WindowSample> out;
  out.reserve(ann.strokes.size());
  for (const auto& stroke : ann.strokes) out.push_back(stroke_window(stroke, window, rng));
  return out;
}

std::vector<WindowSample> sample_detection_windows(const VideoAnnotations& ann, std::size_t window, double ratio,
                                                   Rng& rng, std::size_t per_stroke) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("negative ratio must be >= 0");
  std::vector<WindowSample> out;
  for (const auto& stroke : ann.strokes) {
    for (std::size_t k = 0; k < per_stroke; ++k) {
      auto s = stroke_window(stroke, window, rng);
      s.label = kStroke;
      out.push_back(s);
    }
  }
  const auto negatives = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(out.size())));
  if (negatives == 0) return out;

  // Legal starts: [s, s + window) inside the video and clear of every stroke.
  // Strokes are sorted and disjoint, so the gaps between them are scanned once.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // [lo, hi) of starts
  std::size_t gap_begin = 0;
  std::size_t legal = 0;
  const auto add_gap = [&](std::size_t lo, std::size_t hi) {
    if (hi >= lo + window) {
      ranges.emplace_back(lo, hi - window + 1);
      legal += hi - window + 1 - lo;
    }
  };
  for (const auto& stroke : ann.strokes) {
    add_gap(gap_begin, stroke.begin);
    gap_begin = stroke.end;
  }
  add_gap(gap_begin, ann.frame_count);
  if (legal == 0) {
    throw InputError("video " + ann.video + " has no " + std::to_string(window) +
                     "-frame stretch free of strokes for negative windows");
  }
  for (std::size_t k = 0; k < negatives; ++k) {
    std::size_t pick = rng.below(legal);
    for (const auto& [lo, hi] : ranges) {
      if (pick < hi - lo) {
        out.push_back({lo + pick, window, 0, 0, kNonStroke, 0});
        break;
      }
      pick -= hi - lo;
    }
  }
  return out;
}

}  // namespace strokenet
