// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace strokenet {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit interleaved RGB image, row-major (H×W×3).
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  std::span<const std::uint8_t> bytes() const { return pixels_; }
  std::span<std::uint8_t> mutable_bytes() { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// 8-bit RGB(A)/gray PNG → RGB. Throws InputError on failure.
Image read_png(const std::filesystem::path& path);
// Writes an 8-bit RGB PNG with no timestamp or text chunks.
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace strokenet
