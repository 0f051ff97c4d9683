// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

#include "strokenet/errors.hpp"

namespace strokenet {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp; the message is parked here first.
struct PngError {
  char message[256] = "unknown error";
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof err->message, "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// The setjmp-protected steps below hold no objects with destructors.
bool read_header(png_structp png, png_infop info, std::FILE* file, png_uint_32* width,
                 png_uint_32* height, png_size_t* rowbytes) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  *width = png_get_image_width(png, info);
  *height = png_get_image_height(png, info);
  *rowbytes = png_get_rowbytes(png, info);
  return true;
}

bool read_rows(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

bool write_all(png_structp png, png_infop info, std::FILE* file, png_uint_32 width,
               png_uint_32 height, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw InputError("cannot open " + path.string());
  PngError err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  struct Cleanup {
    png_structp& p;
    png_infop& i;
    ~Cleanup() { png_destroy_read_struct(&p, &i, nullptr); }
  } cleanup{png, info};
  if (!png || !info) throw std::runtime_error("png: out of memory");

  png_uint_32 width = 0, height = 0;
  png_size_t rowbytes = 0;
  if (!read_header(png, info, file.get(), &width, &height, &rowbytes)) {
    throw InputError(path.string() + ": " + err.message);
  }
  if (width == 0 || height == 0 || rowbytes != static_cast<png_size_t>(width) * 3) {
    throw InputError(path.string() + ": unsupported PNG layout");
  }
  Image image(static_cast<int>(width), static_cast<int>(height));
  auto bytes = image.mutable_bytes();
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * rowbytes;
  if (!read_rows(png, rows.data())) throw InputError(path.string() + ": " + err.message);
  return image;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw InputError("cannot open " + path.string() + " for writing");
  PngError err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  struct Cleanup {
    png_structp& p;
    png_infop& i;
    ~Cleanup() { png_destroy_write_struct(&p, &i); }
  } cleanup{png, info};
  if (!png || !info) throw std::runtime_error("png: out of memory");

  std::vector<png_bytep> rows(image.height());
  const auto bytes = image.bytes();
  for (int y = 0; y < image.height(); ++y) {
    rows[y] = const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * image.width() * 3);
  }
  if (!write_all(png, info, file.get(), image.width(), image.height(), rows.data())) {
    throw InputError(path.string() + ": " + err.message);
  }
}

}  // namespace strokenet
