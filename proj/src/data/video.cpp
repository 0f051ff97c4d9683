// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/video.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "strokenet/errors.hpp"
#include "strokenet/tten.hpp"

namespace strokenet {

namespace fs = std::filesystem;

void FrameSequence::validate() const {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].width() != width() || frames[i].height() != height()) {
      throw InputError("frame " + std::to_string(i) + " is " + std::to_string(frames[i].width()) + "x" +
                       std::to_string(frames[i].height()) + ", frame 0 is " + std::to_string(width()) + "x" +
                       std::to_string(height()));
    }
  }
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.png", index);
  return buf;
}

Tensor<float> frames_to_tensor(const FrameSequence& seq) {
  const auto t = seq.frame_count();
  const auto h = static_cast<std::size_t>(seq.height());
  const auto w = static_cast<std::size_t>(seq.width());
  std::vector<float> values;
  values.reserve(t * h * w * 3);
  for (const auto& frame : seq.frames) {
    for (auto b : frame.bytes()) values.push_back(static_cast<float>(b));
  }
  return Tensor<float>({t, h, w, 3}, std::move(values));
}

FrameSequence frames_from_tensor(const Tensor<float>& pixels) {
  if (pixels.rank() != 4 || pixels.dim(3) != 3) {
    throw InputError("video tensor must be T×H×W×3, got " + shape_string(pixels.shape()));
  }
  const auto t = pixels.dim(0), h = pixels.dim(1), w = pixels.dim(2);
  FrameSequence seq;
  seq.frames.reserve(t);
  const auto data = pixels.data();
  for (std::size_t f = 0; f < t; ++f) {
    Image img(static_cast<int>(w), static_cast<int>(h));
    auto bytes = img.mutable_bytes();
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      const float v = data[f * bytes.size() + i];
      if (!(v >= 0.0f && v <= 255.0f) || v != std::floor(v)) {
        throw InputError("video tensor frame " + std::to_string(f) + " holds non-pixel value " + std::to_string(v));
      }
      bytes[i] = static_cast<std::uint8_t>(v);
    }
    seq.frames.push_back(std::move(img));
  }
  return seq;
}

FrameSequence load_frame_sequence(const fs::path& path) {
  FrameSequence seq;
  if (fs::is_directory(path)) {
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("frame_", 0) == 0 && entry.path().extension() == ".png") ++count;
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto file = path / frame_file_name(i);
      if (!fs::exists(file)) throw InputError("frame directory " + path.string() + " is missing " + file.filename().string());
      seq.frames.push_back(read_png(file));
    }
  } else if (fs::is_regular_file(path)) {
    seq = frames_from_tensor(load_tten<float>(path));
  } else {
    throw InputError("no frame directory or TTEN file at " + path.string());
  }
  if (seq.frames.empty()) throw InputError("no frames in " + path.string());
  seq.validate();
  return seq;
}

void save_frame_directory(const fs::path& dir, const FrameSequence& seq) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) write_png(dir / frame_file_name(i), seq.frames[i]);
}

void save_frame_tten(const fs::path& path, const FrameSequence& seq) {
  save_tten(path, frames_to_tensor(seq));
}

void write_clip(const FrameSequence& seq, const WindowSample& sample, std::span<float> out) {
  const auto t = sample.total();
  const auto h = static_cast<std::size_t>(seq.height());
  const auto w = static_cast<std::size_t>(seq.width());
  if (sample.length == 0 || sample.start + sample.length > seq.frame_count()) {
    throw std::invalid_argument("window [" + std::to_string(sample.start) + ", " +
                                std::to_string(sample.start + sample.length) + ") outside video of " +
                                std::to_string(seq.frame_count()) + " frames");
  }
  if (out.size() != 3 * t * h * w) throw std::invalid_argument("write_clip: output span has the wrong size");
  const std::size_t plane = h * w;
  for (std::size_t f = 0; f < t; ++f) {
    std::size_t src = sample.start;
    if (f >= sample.pad_before) src += std::min(f - sample.pad_before, sample.length - 1);
    const auto bytes = seq.frames[src].bytes();
    for (std::size_t p = 0; p < plane; ++p) {
      for (std::size_t c = 0; c < 3; ++c) out[(c * t + f) * plane + p] = static_cast<float>(bytes[p * 3 + c]) / 255.0f;
    }
  }
}

Tensor<float> make_batch(std::span<const FrameSequence* const> videos, std::span<const WindowSample> samples) {
  if (samples.empty()) throw std::invalid_argument("make_batch: no samples");
  const auto& first = *videos[samples[0].video];
  const auto t = samples[0].total();
  const auto h = static_cast<std::size_t>(first.height());
  const auto w = static_cast<std::size_t>(first.width());
  const std::size_t clip = 3 * t * h * w;
  std::vector<float> values(samples.size() * clip);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& seq = *videos[samples[i].video];
    if (samples[i].total() != t || static_cast<std::size_t>(seq.height()) != h ||
        static_cast<std::size_t>(seq.width()) != w) {
      throw std::invalid_argument("make_batch: sample " + std::to_string(i) + " differs in size from sample 0");
    }
    write_clip(seq, samples[i], std::span<float>(values).subspan(i * clip, clip));
  }
  return Tensor<float>({samples.size(), 3, t, h, w}, std::move(values));
}

}  // namespace strokenet
