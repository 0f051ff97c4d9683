// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <map>
#include <sstream>

#include "strokenet/decision.hpp"
#include "strokenet/errors.hpp"

namespace strokenet {

using nlohmann::json;

void to_json(json& j, const Segment& s) {
  j = {{"begin", s.begin}, {"end", s.end}, {"label", s.label}, {"score", s.score}};
}

void from_json(const json& j, Segment& s) {
  s.begin = j.at("begin").get<std::size_t>();
  s.end = j.at("end").get<std::size_t>();
  s.label = j.value("label", std::size_t{0});
  s.score = j.value("score", 1.0);
  if (s.begin >= s.end) {
    throw InputError("segment [" + std::to_string(s.begin) + ", " + std::to_string(s.end) + ") is empty");
  }
  if (!(s.score >= 0.0 && s.score <= 1.0)) throw InputError("segment score outside [0, 1]");
}

void to_json(json& j, const SegmentFile& f) { j = {{"video", f.video}, {"segments", f.segments}}; }

void from_json(const json& j, SegmentFile& f) {
  f.video = j.at("video").get<std::string>();
  f.segments.clear();
  const auto& list = j.contains("segments") ? j.at("segments") : j.at("strokes");
  for (const auto& s : list) f.segments.push_back(s.get<Segment>());
}

std::vector<SegmentFile> load_segment_files(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    const json j = json::parse(text.str());
    if (j.is_array()) return j.get<std::vector<SegmentFile>>();
    return {j.get<SegmentFile>()};
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_segment_file(const std::filesystem::path& path, const SegmentFile& file) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << json(file).dump(2) << "\n";
  if (!out) throw InputError("failed writing " + path.string());
}

std::vector<VideoSegments> pair_videos(const std::vector<SegmentFile>& preds, const std::vector<SegmentFile>& gt) {
  std::map<std::string, const SegmentFile*> by_name;
  for (const auto& g : gt) {
    if (!by_name.emplace(g.video, &g).second) throw PairingError("ground truth lists video '" + g.video + "' twice");
  }
  std::vector<VideoSegments> out;
  std::map<std::string, bool> seen;
  for (const auto& p : preds) {
    const auto it = by_name.find(p.video);
    if (it == by_name.end()) throw PairingError("prediction video '" + p.video + "' has no ground truth");
    if (seen[p.video]) throw PairingError("predictions list video '" + p.video + "' twice");
    seen[p.video] = true;
    out.push_back({p.video, p.segments, it->second->segments});
  }
  for (const auto& g : gt) {
    if (!seen.count(g.video)) throw PairingError("ground-truth video '" + g.video + "' has no predictions");
  }
  return out;
}

}  // namespace strokenet
