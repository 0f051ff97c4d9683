// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "strokenet/errors.hpp"
#include "strokenet/video.hpp"

namespace strokenet {

using nlohmann::json;

void validate_annotations(VideoAnnotations& ann, std::size_t num_classes) {
  const auto& s = ann.strokes;
  const auto where = [&](std::size_t i) { return "stroke " + std::to_string(i); };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].begin >= s[i].end) {
      throw InputError(where(i) + ": begin " + std::to_string(s[i].begin) + " is not before end " +
                       std::to_string(s[i].end));
    }
    if (s[i].end > ann.frame_count) {
      throw InputError(where(i) + ": end " + std::to_string(s[i].end) + " exceeds frame_count " +
                       std::to_string(ann.frame_count));
    }
    if (s[i].label >= num_classes) {
      throw InputError(where(i) + ": label " + std::to_string(s[i].label) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
  }
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s[a].begin < s[b].begin; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto prev = order[k - 1], cur = order[k];
    if (s[cur].begin < s[prev].end) {
      throw InputError("strokes " + std::to_string(std::min(prev, cur)) + " and " +
                       std::to_string(std::max(prev, cur)) + " overlap");
    }
  }
  std::vector<StrokeAnnotation> sorted;
  sorted.reserve(s.size());
  for (auto i : order) sorted.push_back(s[i]);
  ann.strokes = std::move(sorted);
}

VideoAnnotations parse_annotations(std::string_view text, std::size_t num_classes) {
  VideoAnnotations ann;
  try {
    const json j = json::parse(text);
    ann.video = j.at("video").get<std::string>();
    ann.frame_count = j.at("frame_count").get<std::size_t>();
    for (const auto& s : j.at("strokes")) {
      ann.strokes.push_back({s.at("begin").get<std::size_t>(), s.at("end").get<std::size_t>(),
                             s.at("label").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("annotations: ") + e.what());
  }
  validate_annotations(ann, num_classes);
  return ann;
}

VideoAnnotations load_annotations(const std::filesystem::path& path, std::size_t num_classes) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open annotations " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_annotations(text.str(), num_classes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string annotations_json(const VideoAnnotations& ann) {
  json strokes = json::array();
  for (const auto& s : ann.strokes) strokes.push_back({{"begin", s.begin}, {"end", s.end}, {"label", s.label}});
  const json j = {{"video", ann.video}, {"frame_count", ann.frame_count}, {"strokes", strokes}};
  return j.dump(2) + "\n";
}

void save_annotations(const std::filesystem::path& path, const VideoAnnotations& ann) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << annotations_json(ann);
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace strokenet
