// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <map>

#include "json.hpp"
#include "strokenet/errors.hpp"
#include "strokenet/pose.hpp"

namespace strokenet {

using nlohmann::json;

namespace {

double unit_interval(const json& v, const char* what, std::size_t line) {
  const double x = v.get<double>();
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InputError("keypoint stream line " + std::to_string(line) + ": " + what +
                     " outside [0,1]");
  }
  return x;
}

PersonPose parse_person(const json& j, std::size_t line) {
  PersonPose p;
  p.score = unit_interval(j.at("score"), "score", line);
  const auto& kps = j.at("keypoints");
  if (!kps.is_array() || kps.size() != kNumKeypoints) {
    throw InputError("keypoint stream line " + std::to_string(line) + ": expected 17 keypoints, got " +
                     std::to_string(kps.is_array() ? kps.size() : 0));
  }
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    const auto& kp = kps[k];
    if (!kp.is_array() || kp.size() != 3) {
      throw InputError("keypoint stream line " + std::to_string(line) + ": keypoint " +
                       std::to_string(k) + " is not [x,y,c]");
    }
    p.keypoints[k] = {kp[0].get<double>(), kp[1].get<double>(), unit_interval(kp[2], "confidence", line)};
  }
  return p;
}

}  // namespace

std::vector<PoseFrame> parse_keypoint_stream(std::istream& in, std::optional<std::size_t> frame_count) {
  std::map<std::size_t, PoseFrame> by_index;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    PoseFrame frame;
    try {
      const json j = json::parse(text);
      const auto idx = j.at("frame").get<std::int64_t>();
      if (idx < 0) throw InputError("negative frame index");
      frame.frame_index = static_cast<std::size_t>(idx);
      for (const auto& p : j.at("persons")) frame.persons.push_back(parse_person(p, line));
    } catch (const json::exception& e) {
      throw InputError("keypoint stream line " + std::to_string(line) + ": " + e.what());
    } catch (const InputError& e) {
      const std::string msg = e.what();
      if (msg.rfind("keypoint stream line", 0) == 0) throw;
      throw InputError("keypoint stream line " + std::to_string(line) + ": " + msg);
    }
    if (by_index.contains(frame.frame_index)) {
      throw InputError("keypoint stream line " + std::to_string(line) + ": duplicate frame " +
                       std::to_string(frame.frame_index));
    }
    by_index.emplace(frame.frame_index, std::move(frame));
  }

  std::size_t count = by_index.empty() ? 0 : by_index.rbegin()->first + 1;
  if (frame_count) count = std::max(count, *frame_count);
  std::vector<PoseFrame> frames(count);
  for (std::size_t i = 0; i < count; ++i) frames[i].frame_index = i;
  for (auto& [idx, frame] : by_index) frames[idx] = std::move(frame);
  return frames;
}

std::vector<PoseFrame> parse_keypoint_stream(const std::filesystem::path& path,
                                             std::optional<std::size_t> frame_count) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open keypoint stream " + path.string());
  return parse_keypoint_stream(in, frame_count);
}

void write_keypoint_stream(std::ostream& out, const std::vector<PoseFrame>& frames) {
  for (const auto& frame : frames) {
    json persons = json::array();
    for (const auto& p : frame.persons) {
      json kps = json::array();
      for (const auto& k : p.keypoints) kps.push_back({k.x, k.y, k.confidence});
      persons.push_back({{"score", p.score}, {"keypoints", std::move(kps)}});
    }
    out << json{{"frame", frame.frame_index}, {"persons", std::move(persons)}}.dump() << '\n';
  }
}

void write_keypoint_stream(const std::filesystem::path& path, const std::vector<PoseFrame>& frames) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_keypoint_stream(out, frames);
}

}  // namespace strokenet
