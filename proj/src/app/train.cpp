// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "strokenet/errors.hpp"
#include "strokenet/ops.hpp"
#include "strokenet/pipeline.hpp"

namespace strokenet {

namespace {

// Window sampling and evaluation draw from generators distinct from weight init.
constexpr std::uint64_t kSampleStream = 0x5deece66dULL;
constexpr std::uint64_t kEvalStream = 0x2545f4914f6cdd1dULL;

std::vector<WindowSample> epoch_windows(const RunConfig& cfg, const std::vector<LoadedVideo>& videos, Rng& rng,
                                        std::size_t per_stroke) {
  std::vector<WindowSample> out;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    auto w = cfg.task == Task::classify
                 ? sample_class_windows(videos[v].annotations, cfg.model.frames, rng)
                 : sample_detection_windows(videos[v].annotations, cfg.model.frames, cfg.negative_ratio, rng,
                                            per_stroke);
    for (auto& s : w) s.video = v;
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

// Runs the model on one batch, building one clip tensor per stream.
Tensor<float> forward_batch(const TwoStreamNet<float>& net, const std::vector<LoadedVideo>& videos,
                            std::span<const WindowSample> batch) {
  const std::size_t streams = static_cast<std::size_t>(net.config().streams);
  std::vector<Tensor<float>> clips;
  std::vector<const FrameSequence*> seqs(videos.size());
  for (std::size_t s = 0; s < streams; ++s) {
    for (std::size_t v = 0; v < videos.size(); ++v) seqs[v] = &videos[v].streams.at(s);
    clips.push_back(make_batch(seqs, batch));
  }
  return net.forward(clips[0], streams == 2 ? &clips[1] : nullptr);
}

std::size_t count_correct(const Tensor<float>& probs, std::span<const WindowSample> batch) {
  const std::size_t k = probs.dim(1);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto row = probs.data().subspan(i * k, k);
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (row[c] > row[best]) best = c;
    correct += best == batch[i].label;
  }
  return correct;
}

}  // namespace

nlohmann::json to_json(const EpochStats& s) {
  nlohmann::json j = {{"epoch", s.epoch}, {"loss", s.loss}, {"train_accuracy", s.train_accuracy}};
  if (s.validation_accuracy) j["validation_accuracy"] = *s.validation_accuracy;
  return j;
}

std::vector<WindowSample> evaluation_windows(const RunConfig& cfg, const std::vector<LoadedVideo>& videos) {
  Rng rng(cfg.seed ^ kEvalStream);
  return epoch_windows(cfg, videos, rng, 1);
}

double window_accuracy(const TwoStreamNet<float>& net, const std::vector<LoadedVideo>& videos,
                       const std::vector<WindowSample>& windows, std::size_t batch_size) {
  if (windows.empty()) return 0.0;
  NoGradGuard no_grad;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < windows.size(); b += batch_size) {
    const auto batch = std::span(windows).subspan(b, std::min(batch_size, windows.size() - b));
    correct += count_correct(forward_batch(net, videos, batch), batch);
  }
  return static_cast<double>(correct) / static_cast<double>(windows.size());
}

TrainResult train(const RunConfig& cfg, const std::vector<LoadedVideo>& train_set,
                  const std::vector<LoadedVideo>* validation_set,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw InputError("training set is empty");
  for (const auto& v : train_set) {
    if (v.streams.size() != cfg.inputs.size()) throw std::invalid_argument("video " + v.name + " lacks stream inputs");
  }

  auto net = TwoStreamNet<float>::init(cfg.model, cfg.seed);
  auto params = net.parameters();
  TrainResult result{net.clone(), net.clone(), {}, 0, -1.0};
  Rng rng(cfg.seed ^ kSampleStream);
  std::vector<WindowSample> validation_windows;
  if (validation_set) validation_windows = evaluation_windows(cfg, *validation_set);

  for (int epoch = 1; epoch <= cfg.optimizer.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    auto samples = epoch_windows(cfg, train_set, rng, cfg.windows_per_stroke);
    if (samples.empty()) throw InputError("training set holds no strokes");
    rng.shuffle(samples.begin(), samples.end());

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<std::size_t> labels;
    for (std::size_t b = 0; b < samples.size(); b += cfg.batch_size) {
      const auto batch = std::span(samples).subspan(b, std::min(cfg.batch_size, samples.size() - b));
      labels.clear();
      for (const auto& s : batch) labels.push_back(s.label);
      const auto probs = forward_batch(net, train_set, batch);
      const auto loss = cross_entropy(probs, labels);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                               std::to_string(b / cfg.batch_size + 1),
                           epoch);
      }
      correct += count_correct(probs, batch);
      loss_sum += value * static_cast<double>(batch.size());
      loss.backward();
      sgd_step<float>(params, cfg.optimizer);
      zero_grads<float>(params);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(samples.size());
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    if (validation_set)
      stats.validation_accuracy = window_accuracy(net, *validation_set, validation_windows, cfg.batch_size);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);

    const double score = stats.validation_accuracy.value_or(stats.train_accuracy);
    if (score > result.best_accuracy) {
      result.best_accuracy = score;
      result.best_epoch = epoch;
      result.best_model = net.clone();
    }
    if (cfg.stop_accuracy > 0.0 && stats.train_accuracy >= cfg.stop_accuracy) break;
  }
  if (result.best_accuracy < 0.0) result.best_accuracy = 0.0;
  result.final_model = std::move(net);
  return result;
}

TrainResult run_training(const RunConfig& cfg, std::ostream* progress) {
  cfg.validate();
  if (cfg.train_data.empty()) throw InputError("config names no train_data manifest");
  const auto train_set = load_dataset(cfg.train_data, cfg);
  std::vector<LoadedVideo> validation_set;
  if (!cfg.validation_data.empty()) validation_set = load_dataset(cfg.validation_data, cfg);
  if (progress) {
    for (const auto& v : train_set)
      for (const auto& w : v.warnings) *progress << "warning: " << w << "\n";
  }

  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out(cfg.output_dir / "config.json");
    if (!out) throw InputError("cannot write to " + cfg.output_dir.string());
    out << nlohmann::json(cfg).dump(2) << "\n";
  }
  std::ofstream log(cfg.output_dir / "train_log.jsonl");
  if (!log) throw InputError("cannot write to " + cfg.output_dir.string());
  auto result = train(cfg, train_set, validation_set.empty() ? nullptr : &validation_set, [&](const EpochStats& s) {
    log << to_json(s).dump() << "\n" << std::flush;
    if (progress) {
      auto line = to_json(s);
      line["seconds"] = s.seconds;
      *progress << line.dump() << "\n" << std::flush;
    }
  });
  save_checkpoint(cfg.output_dir / "final.ckpt", result.final_model);
  save_checkpoint(cfg.output_dir / "best.ckpt", result.best_model);
  return result;
}

}  // namespace strokenet
