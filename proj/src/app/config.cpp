// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <sstream>

#include "strokenet/errors.hpp"
#include "strokenet/pipeline.hpp"

namespace strokenet {

using nlohmann::json;

std::string to_string(StreamInput input) {
  switch (input) {
    case StreamInput::rgb: return "rgb";
    case StreamInput::pose: return "pose";
    case StreamInput::prgb: return "prgb";
  }
  return "?";
}

std::string to_string(Task task) { return task == Task::classify ? "classify" : "detect"; }

StreamInput parse_stream_input(const std::string& name) {
  for (auto s : {StreamInput::rgb, StreamInput::pose, StreamInput::prgb})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("inputs: unknown stream input '" + name + "' (expected rgb, pose or prgb)");
}

Task parse_task(const std::string& name) {
  if (name == "classify") return Task::classify;
  if (name == "detect") return Task::detect;
  throw std::invalid_argument("task: unknown task '" + name + "' (expected classify or detect)");
}

void RunConfig::validate() const {
  model.validate();
  optimizer.validate();
  decision.validate();
  const auto streams = static_cast<std::size_t>(model.streams);
  if (inputs.size() != streams) {
    throw std::invalid_argument("inputs: " + std::to_string(inputs.size()) + " stream inputs for a " +
                                std::to_string(streams) + "-stream model");
  }
  if (model.channels != 3) throw std::invalid_argument("model.input_size: stream inputs have 3 channels");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (task == Task::detect && model.num_classes != 2) {
    throw std::invalid_argument("model.num_classes: detection uses 2 classes (non-stroke, stroke)");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (min_length == 0) throw std::invalid_argument("min_length must be >= 1");
  if (!(negative_ratio >= 0.0) || !std::isfinite(negative_ratio))
    throw std::invalid_argument("negative_ratio must be >= 0");
  if (windows_per_stroke == 0) throw std::invalid_argument("windows_per_stroke must be >= 1");
  if (!(stop_accuracy >= 0.0 && stop_accuracy <= 1.0)) throw std::invalid_argument("stop_accuracy must lie in [0, 1]");
}

RunConfig RunConfig::desk() {
  RunConfig c;
  c.profile = "desk";
  c.optimizer.epochs = 500;
  c.decision.kind = DecisionKind::vote_sliding;
  c.min_length = 2;
  return c;
}

RunConfig RunConfig::paper() {
  RunConfig c;
  c.profile = "paper";
  c.model = ModelConfig::paper();
  c.inputs = {StreamInput::rgb, StreamInput::prgb};
  c.decision.kind = DecisionKind::no_window;
  c.min_length = 20;
  return c;
}

RunConfig RunConfig::for_profile(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "paper") return paper();
  throw std::invalid_argument("profile: unknown profile '" + name + "' (expected desk or paper)");
}

void to_json(json& j, const RunConfig& c) {
  std::vector<std::string> inputs;
  for (auto s : c.inputs) inputs.push_back(to_string(s));
  j = {{"profile", c.profile},
       {"task", to_string(c.task)},
       {"model", c.model},
       {"optimizer",
        {{"learning_rate", c.optimizer.learning_rate},
         {"momentum", c.optimizer.momentum},
         {"epochs", c.optimizer.epochs}}},
       {"inputs", inputs},
       {"batch_size", c.batch_size},
       {"seed", c.seed},
       {"train_data", c.train_data.generic_string()},
       {"validation_data", c.validation_data.generic_string()},
       {"output_dir", c.output_dir.generic_string()},
       {"decision", c.decision},
       {"threshold", c.threshold},
       {"min_length", c.min_length},
       {"negative_ratio", c.negative_ratio},
       {"windows_per_stroke", c.windows_per_stroke},
       {"stop_accuracy", c.stop_accuracy}};
}

void merge_run_config(const json& j, RunConfig& c) {
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
  if (j.contains("profile")) c.profile = j.at("profile").get<std::string>();
  if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
  if (j.contains("model")) from_json(j.at("model"), c.model);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    c.optimizer.learning_rate = o.value("learning_rate", c.optimizer.learning_rate);
    c.optimizer.momentum = o.value("momentum", c.optimizer.momentum);
    c.optimizer.epochs = o.value("epochs", c.optimizer.epochs);
  }
  if (j.contains("inputs")) {
    c.inputs.clear();
    for (const auto& s : j.at("inputs")) c.inputs.push_back(parse_stream_input(s.get<std::string>()));
  }
  if (j.contains("decision")) {
    const auto& d = j.at("decision");
    if (d.is_string()) {
      c.decision.kind = parse_decision_kind(d.get<std::string>());
    } else {
      if (d.contains("method")) c.decision.kind = parse_decision_kind(d.at("method").get<std::string>());
      c.decision.sigma = d.value("sigma", c.decision.sigma);
      c.decision.stride = d.value("stride", c.decision.stride);
    }
  }
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  if (j.contains("train_data")) c.train_data = j.at("train_data").get<std::string>();
  if (j.contains("validation_data")) c.validation_data = j.at("validation_data").get<std::string>();
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  c.threshold = j.value("threshold", c.threshold);
  c.min_length = j.value("min_length", c.min_length);
  c.negative_ratio = j.value("negative_ratio", c.negative_ratio);
  c.windows_per_stroke = j.value("windows_per_stroke", c.windows_per_stroke);
  c.stop_accuracy = j.value("stop_accuracy", c.stop_accuracy);
}

RunConfig load_run_config(const std::filesystem::path& path, const std::optional<std::string>& profile) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  json j;
  try {
    j = json::parse(text.str());
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  RunConfig cfg;
  try {
    const std::string name = profile ? *profile : j.value("profile", std::string("desk"));
    cfg = RunConfig::for_profile(name);
    merge_run_config(j, cfg);
    cfg.profile = name;
    cfg.validate();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  for (auto* p : {&cfg.train_data, &cfg.validation_data, &cfg.output_dir}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return cfg;
}

json reference_results() {
  const auto cls = [](json train, double val, double test) {
    return json{{"train", train}, {"validation", val}, {"test", test}};
  };
  const auto det = [](json train, json val, double iou, double map) {
    return json{{"train", train}, {"validation", val}, {"test_iou", iou}, {"test_map", map}};
  };
  return {
      {"dataset", "TTStroke-21"},
      {"note", "published figures for comparison only; not produced by this build"},
      {"classification",
       {{"baseline", cls(nullptr, 0.813, 0.864)},
        {"pose", cls(0.995, 0.878, 0.847)},
        {"prgb", cls(0.978, 0.813, 0.864)},
        {"rgb_pose", cls(1.0, 0.830, 0.872)},
        {"rgb_prgb", cls(0.998, 0.848, 0.873)}}},
      {"detection",
       {{"baseline", det(nullptr, nullptr, 0.515, 0.131)},
        {"pose", det(0.862, 0.591, 0.205, 0.046)},
        {"prgb", det(0.980, 0.834, 0.165, 0.036)},
        {"rgb_pose", det(0.987, 0.820, 0.331, 0.100)},
        {"rgb_prgb", det(0.990, 0.840, 0.349, 0.110)}}},
      {"decision",
       {{"two_stream_and_single_stream", "no_window"},
        {"baseline_classification", "gaussian"},
        {"baseline_detection", "vote_sliding (iou 0.365 with mean, map 0.118 with vote)"}}}};
}

}  // namespace strokenet
