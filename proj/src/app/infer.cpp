// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/pipeline.hpp"

namespace strokenet {

std::vector<WindowPrediction> predict_windows(const TwoStreamNet<float>& net, const LoadedVideo& video,
                                              const std::vector<WindowSample>& windows, std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  const std::size_t streams = static_cast<std::size_t>(net.config().streams);
  if (video.streams.size() < streams) throw std::invalid_argument("video " + video.name + " lacks stream inputs");
  NoGradGuard no_grad;
  std::vector<WindowPrediction> out;
  out.reserve(windows.size());
  for (std::size_t b = 0; b < windows.size(); b += batch_size) {
    const auto batch = std::span(windows).subspan(b, std::min(batch_size, windows.size() - b));
    std::vector<Tensor<float>> clips;
    for (std::size_t s = 0; s < streams; ++s) {
      const FrameSequence* seq[] = {&video.streams[s]};
      clips.push_back(make_batch(seq, batch));
    }
    const auto probs = net.forward(clips[0], streams == 2 ? &clips[1] : nullptr);
    const std::size_t k = probs.dim(1);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto row = probs.data().subspan(i * k, k);
      out.push_back({batch[i].start, batch[i].length, std::vector<double>(row.begin(), row.end())});
    }
  }
  return out;
}

nlohmann::json to_json(const ClipResult& r) {
  return {{"video", r.video},
          {"label", r.decision.label},
          {"probs", r.decision.probs},
          {"votes", r.decision.votes},
          {"method", to_string(r.method)},
          {"windows", r.windows}};
}

ClipResult classify_clip(const TwoStreamNet<float>& net, const LoadedVideo& video, const DecisionMethod& method,
                         std::size_t batch_size) {
  method.validate();
  const std::size_t window = net.config().frames;
  const std::size_t n = video.frames.frame_count();
  std::vector<WindowSample> windows;
  if (n >= window) {
    for (auto s : sliding_starts(n, window, method.stride)) windows.push_back({s, window, 0, 0, 0, 0});
  } else {
    Rng unused(0);  // a short stroke gives a fixed padded window
    windows.push_back(stroke_window({0, n, 0}, window, unused));
  }
  const auto preds = predict_windows(net, video, windows, batch_size);
  ClipResult r;
  r.video = video.name;
  r.method = method.kind;
  r.windows = preds.size();
  r.decision = aggregate_clip(preds, method, static_cast<double>(n) / 2.0, window);
  return r;
}

DetectionResult detect_video(const TwoStreamNet<float>& net, const LoadedVideo& video,
                             const DecisionMethod& method, double threshold, std::size_t min_length,
                             std::size_t batch_size) {
  method.validate();
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (net.config().num_classes != 2) throw std::invalid_argument("detection needs a 2-class model");
  const std::size_t window = net.config().frames;
  const std::size_t n = video.frames.frame_count();
  DetectionResult r;
  r.segments.video = video.name;
  r.curve.assign(n, 0.0);
  if (n < window) {
    r.too_short = true;
    return r;
  }
  std::vector<WindowSample> windows;
  for (auto s : sliding_starts(n, window, method.stride)) windows.push_back({s, window, 0, 0, 0, 0});
  const auto preds = predict_windows(net, video, windows, batch_size);
  r.curve = frame_curve(preds, n, method, window, kStroke);
  r.segments.segments = extract_segments(r.curve, threshold, min_length, 0);
  return r;
}

}  // namespace strokenet
